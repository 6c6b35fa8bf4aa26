//! Parameter files for `iterate` and `compare`.
//!
//! Complex numbers are `[re, im]` pairs and coordinates may also be `"inf"`.
//!
//! * tj1, msy: `{ "k"?, "c": [8 pairs], "eta", "x"?, "y"? }`
//! * rcg: `{ "k"?, "gamma_e", "gamma_o", "z0", "x"?, "y"? }`
//! * msypr: `{ "k"?, "c": [4 pairs], "eta", "lambda", "x"?, "x_prev"? }`
//!
//! `k` defaults to 0.5. Missing coordinates are drawn from the seed.

use std::path::Path;

use e8p_core::painleve::{Equation, EquationState, MsyPrParams, RcgParams};
use e8p_core::scalar::{cx, from_c64};
use e8p_core::weyl::{random_coordinate, random_state, sample_rng, SurfaceState};
use e8p_core::{EllipticContext, ProjectiveValue, Real};
use serde::Deserialize;

use crate::CliError;

type Pair = [f64; 2];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FullFile {
    k: Option<Pair>,
    c: [Pair; 8],
    eta: Pair,
    x: Option<ProjectiveValue<f64>>,
    y: Option<ProjectiveValue<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RcgFile {
    k: Option<Pair>,
    gamma_e: Pair,
    gamma_o: Pair,
    z0: Pair,
    x: Option<ProjectiveValue<f64>>,
    y: Option<ProjectiveValue<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MsyPrFile {
    k: Option<Pair>,
    c: [Pair; 4],
    eta: Pair,
    lambda: Pair,
    x: Option<ProjectiveValue<f64>>,
    x_prev: Option<ProjectiveValue<f64>>,
}

/// Binary64 description of a starting state, widened on demand.
#[derive(Debug, Clone)]
pub struct StartSpec {
    equation: Equation,
    k: Pair,
    /// tj1/msy: c1..c8; rcg: gamma_e, gamma_o, z0; msypr: c1..c4, lambda.
    values: Vec<Pair>,
    eta: Pair,
    x: ProjectiveValue<f64>,
    y: ProjectiveValue<f64>,
}

const DEFAULT_K: Pair = [0.5, 0.0];

fn pair(z: e8p_core::Cx<f64>) -> Pair {
    [z.re, z.im]
}

impl StartSpec {
    pub fn load(equation: Equation, path: Option<&Path>, seed: u64) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::random(equation, seed)) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(equation, &text, seed).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(equation: Equation, text: &str, seed: u64) -> Result<Self, String> {
        let mut rng = sample_rng(seed, 0);
        let mut coord =
            |p: Option<ProjectiveValue<f64>>| p.unwrap_or_else(|| ProjectiveValue::finite(random_coordinate(&mut rng)));
        let err = |e: serde_json::Error| e.to_string();
        Ok(match equation {
            Equation::Tj1 | Equation::Msy => {
                let f: FullFile = serde_json::from_str(text).map_err(err)?;
                let (x, y) = (coord(f.x), coord(f.y));
                StartSpec { equation, k: f.k.unwrap_or(DEFAULT_K), values: f.c.to_vec(), eta: f.eta, x, y }
            }
            Equation::Rcg => {
                let f: RcgFile = serde_json::from_str(text).map_err(err)?;
                let (x, y) = (coord(f.x), coord(f.y));
                let values = vec![f.gamma_e, f.gamma_o, f.z0];
                StartSpec { equation, k: f.k.unwrap_or(DEFAULT_K), values, eta: [0.0, 0.0], x, y }
            }
            Equation::Msypr => {
                let f: MsyPrFile = serde_json::from_str(text).map_err(err)?;
                let (x, y) = (coord(f.x), coord(f.x_prev));
                let mut values = f.c.to_vec();
                values.push(f.lambda);
                StartSpec { equation, k: f.k.unwrap_or(DEFAULT_K), values, eta: f.eta, x, y }
            }
        })
    }

    /// Parameters drawn from the seed, in the same boxes as the verification suites.
    pub fn random(equation: Equation, seed: u64) -> Self {
        let st: SurfaceState<f64> = random_state(&mut sample_rng(seed, 0), 1e-12);
        let c: Vec<Pair> = st.c.iter().map(|z| pair(*z)).collect();
        let values = match equation {
            Equation::Tj1 | Equation::Msy => c,
            Equation::Rcg => c[..3].to_vec(),
            Equation::Msypr => {
                let mut v = c[..4].to_vec();
                v.push(pair(st.c[4] + st.c[5] + st.c[6] + st.c[7]));
                v
            }
        };
        StartSpec { equation, k: pair(st.ctx.k), values, eta: pair(st.eta), x: st.x, y: st.y }
    }

    pub fn build<R: Real>(&self, tol: f64) -> Result<EquationState<R>, CliError> {
        let z = |p: Pair| from_c64::<R>(cx(p[0], p[1]));
        let ctx = EllipticContext::<R>::new(z(self.k), tol).map_err(|e| CliError::Config(e.to_string()))?;
        let (x, y) = (self.x.convert::<R>(), self.y.convert::<R>());
        let v = &self.values;
        Ok(match self.equation {
            Equation::Tj1 | Equation::Msy => {
                let c: [_; 8] = std::array::from_fn(|i| z(v[i]));
                let st = SurfaceState::new(c, z(self.eta), x, y, ctx);
                if self.equation == Equation::Tj1 {
                    EquationState::Tj1(st)
                } else {
                    EquationState::Msy(st)
                }
            }
            Equation::Rcg => {
                let params = RcgParams { gamma_e: z(v[0]), gamma_o: z(v[1]), z0: z(v[2]), ctx };
                EquationState::Rcg { params, x, y }
            }
            Equation::Msypr => {
                let params = MsyPrParams { c: std::array::from_fn(|i| z(v[i])), lambda: z(v[4]), ctx };
                EquationState::Msypr { params, eta: z(self.eta), x_prev: y, x_curr: x }
            }
        })
    }
}
