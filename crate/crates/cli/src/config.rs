//! JSON run configuration.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;
use toric_gk::{
    guillemin_potential, perturbed_potential, quadratic_potential, BasisTerm, Facet, GkParams, GridSpec, Monomial,
    Params64, PerturbationBasis, Polytope64, Potential64,
};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub polytope: PolytopeSpec,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub params: Option<ParamsSpec>,
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub basis: Option<Vec<BasisTerm>>,
    #[serde(default)]
    pub budget: Option<usize>,
    /// Random draws per identity in the Clifford self-test.
    #[serde(default)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeSpec {
    pub dim: usize,
    pub facets: Vec<FacetSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    #[default]
    Guillemin,
    Quadratic,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(default)]
    pub kind: BaseKind,
    #[serde(default)]
    pub perturbation: Vec<TermSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub powers: Vec<u32>,
    pub coeff: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    #[serde(rename = "C", default)]
    pub c: Option<Vec<Vec<f64>>>,
    #[serde(rename = "F", default)]
    pub f: Option<Vec<Vec<f64>>>,
}

/// Tolerance names understood by the commands, with their defaults.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("frame", 1e-9),
    ("equivalence", 1e-7),
    ("ricci", 1e-7),
    ("constancy", 1e-5),
    ("curvature_symmetry", 1e-4),
    ("integrability", 1e-4),
    ("epsilon", 1e-7),
    ("clifford", 1e-12),
    ("csc", 1e-8),
];

pub const DEFAULT_SEED: u64 = 2024;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Read {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Parse {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        for name in cfg.tolerances.keys() {
            if !DEFAULT_TOLERANCES.iter().any(|(k, _)| k == name) {
                return Err(CliError::Invalid(format!("unknown tolerance `{name}`")));
            }
        }
        Ok(cfg)
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| {
            DEFAULT_TOLERANCES
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .expect("tolerance name is registered")
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn polytope(&self) -> Result<Polytope64, CliError> {
        let facets = self
            .polytope
            .facets
            .iter()
            .map(|f| Facet::new(f.normal.clone(), f.offset))
            .collect();
        Ok(Polytope64::new(self.polytope.dim, facets)?)
    }

    pub fn potential(&self) -> Result<Potential64, CliError> {
        let p = self.polytope()?;
        let base = match self.potential.kind {
            BaseKind::Guillemin => guillemin_potential(&p),
            BaseKind::Quadratic => quadratic_potential(&p),
        };
        if self.potential.perturbation.is_empty() {
            return Ok(base);
        }
        let terms: Vec<Monomial<f64>> = self
            .potential
            .perturbation
            .iter()
            .map(|t| Monomial::new(t.powers.clone(), t.coeff))
            .collect();
        Ok(perturbed_potential(&base, &terms)?)
    }

    pub fn params(&self) -> Result<Params64, CliError> {
        let n = self.polytope.dim;
        let spec = self.params.as_ref();
        let c = matrix("C", n, spec.and_then(|p| p.c.as_ref()))?;
        let f = matrix("F", n, spec.and_then(|p| p.f.as_ref()))?;
        Ok(GkParams::new(c, f)?)
    }

    pub fn basis(&self) -> Result<PerturbationBasis, CliError> {
        let terms = self
            .basis
            .clone()
            .ok_or_else(|| CliError::Invalid("csc-optimize needs a `basis`".into()))?;
        for (k, t) in terms.iter().enumerate() {
            if t.powers.len() != self.polytope.dim {
                return Err(CliError::Invalid(format!(
                    "basis term {k} has {} powers (expected {})",
                    t.powers.len(),
                    self.polytope.dim
                )));
            }
        }
        Ok(PerturbationBasis::new(terms)?)
    }
}

fn matrix(name: &str, n: usize, rows: Option<&Vec<Vec<f64>>>) -> Result<DMatrix<f64>, CliError> {
    let Some(rows) = rows else {
        return Ok(DMatrix::zeros(n, n));
    };
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Invalid(format!("{name} must be a {n}x{n} matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}
