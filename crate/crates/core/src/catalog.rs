//! Concrete semigroup instances, reproducible from `(kind, q, n_max, seed)`.

use dashu_int::UBig;
use dashu_ratio::RBig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{Precision, Real};
use crate::semigroup::{
    count_elements, lambda_from_normalized, normalized_from_lambda, poly_generator_counts,
    recover_generators, ElementCounts, GeneratorCounts,
};
use crate::seqio::SequenceTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemigroupKind {
    /// Monic polynomials over a field of `q` elements.
    PolyOverFq,
    ExplicitP,
    ExplicitG,
    /// Polynomials over `F_q` with extra generators in low degrees.
    Perturbed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// Exact non-negative integer counts.
    #[default]
    Strict,
    /// Real-valued counts, for prescribing residual models directly.
    Analysis,
}

/// Adds `delta_k`, drawn uniformly from `0..=amplitude`, to `P(k)` for
/// `k <= max_degree`. Draws come from ChaCha8 seeded with the spec seed, in
/// ascending degree order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub max_degree: usize,
    pub amplitude: u64,
}

impl Default for Perturbation {
    fn default() -> Self {
        Self {
            max_degree: 4,
            amplitude: 2,
        }
    }
}

impl Perturbation {
    pub fn draw(&self, seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..self.max_degree)
            .map(|_| rng.random_range(0..=self.amplitude))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemigroupSpec {
    pub kind: SemigroupKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    pub n_max: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
    pub mode: CountMode,
    /// File the explicit sequence was read from, for reports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl SemigroupSpec {
    pub fn poly(q: u64, n_max: usize) -> Self {
        Self {
            kind: SemigroupKind::PolyOverFq,
            q: Some(q),
            n_max,
            seed: 0,
            perturbation: None,
            mode: CountMode::Strict,
            source: None,
        }
    }

    pub fn perturbed(q: u64, n_max: usize, seed: u64, perturbation: Perturbation) -> Self {
        Self {
            kind: SemigroupKind::Perturbed,
            q: Some(q),
            n_max,
            seed,
            perturbation: Some(perturbation),
            mode: CountMode::Strict,
            source: None,
        }
    }

    pub fn explicit(kind: SemigroupKind, n_max: usize, q: Option<u64>, mode: CountMode) -> Self {
        Self {
            kind,
            q,
            n_max,
            seed: 0,
            perturbation: None,
            mode,
            source: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::InvalidInput("n_max must be >= 1".into()));
        }
        if let Some(q) = self.q {
            if q < 2 {
                return Err(Error::InvalidInput(format!("q must be >= 2, got {q}")));
            }
        }
        match self.kind {
            SemigroupKind::PolyOverFq | SemigroupKind::Perturbed if self.q.is_none() => {
                Err(Error::InvalidInput(format!("{:?} needs q", self.kind)))
            }
            SemigroupKind::PolyOverFq | SemigroupKind::Perturbed if self.mode == CountMode::Analysis => {
                Err(Error::InvalidInput("catalog instances are strict".into()))
            }
            SemigroupKind::Perturbed => {
                let pert = self.perturbation.unwrap_or_default();
                if pert.max_degree == 0 || pert.max_degree > self.n_max {
                    Err(Error::InvalidInput(format!(
                        "perturbation degree {} outside 1..={}",
                        pert.max_degree, self.n_max
                    )))
                } else {
                    Ok(())
                }
            }
            _ if self.mode == CountMode::Analysis && self.q.is_none() => Err(Error::InvalidInput(
                "analysis-mode instances need q to normalize".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Real-valued normalized description of an analysis-mode instance.
#[derive(Clone, Debug)]
pub struct AnalysisCounts {
    pub q: Real,
    /// `G(n)/q^n` for `n = 0..=n_max`.
    pub g_norm: Vec<Real>,
    /// `n P(n)/q^n` for `n = 1..=n_max`.
    pub lambda: Vec<Real>,
}

#[derive(Clone, Debug)]
pub enum InstanceCounts {
    Exact {
        p: GeneratorCounts,
        g: ElementCounts,
    },
    Analysis(AnalysisCounts),
}

/// A resolved semigroup: its counts plus whatever the construction fixes exactly.
#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: SemigroupSpec,
    pub counts: InstanceCounts,
    /// Integral growth base when known.
    pub known_q: Option<u64>,
    /// `A = lim G(n)/q^n` when the construction determines it exactly.
    pub known_a: Option<RBig>,
}

impl Instance {
    /// Builds an instance from its spec; explicit kinds read `table`.
    pub fn resolve(spec: &SemigroupSpec, table: Option<&SequenceTable>, prec: Precision) -> Result<Self> {
        spec.validate()?;
        let spec = spec.clone();
        let need_table = || {
            table.ok_or_else(|| Error::InvalidInput(format!("{:?} needs a sequence file", spec.kind)))
        };
        match (spec.kind, spec.mode) {
            (SemigroupKind::PolyOverFq, _) => {
                let q = spec.q.expect("validated");
                let p = poly_generator_counts(q, spec.n_max)?;
                let g = ElementCounts::geometric(&UBig::from(q), spec.n_max)?;
                Ok(Self {
                    spec,
                    counts: InstanceCounts::Exact { p, g },
                    known_q: Some(q),
                    known_a: Some(RBig::ONE),
                })
            }
            (SemigroupKind::Perturbed, _) => {
                let q = spec.q.expect("validated");
                let pert = spec.perturbation.unwrap_or_default();
                let deltas = pert.draw(spec.seed);
                let base = poly_generator_counts(q, spec.n_max)?;
                let mut values = base.values().to_vec();
                for (k, delta) in deltas.iter().enumerate() {
                    values[k] += UBig::from(*delta);
                }
                let p = GeneratorCounts::new(values)?;
                let g = count_elements(&p);
                let known_a = perturbed_limit(q, &deltas);
                Ok(Self {
                    spec,
                    counts: InstanceCounts::Exact { p, g },
                    known_q: Some(q),
                    known_a: Some(known_a),
                })
            }
            (SemigroupKind::ExplicitP, CountMode::Strict) => {
                let p = need_table()?.generator_counts()?.truncate(spec.n_max)?;
                check_length(p.n_max(), spec.n_max)?;
                let g = count_elements(&p);
                Ok(Self::explicit_exact(spec, p, g))
            }
            (SemigroupKind::ExplicitG, CountMode::Strict) => {
                let g = need_table()?.element_counts()?;
                check_length(g.n_max(), spec.n_max)?;
                let g = ElementCounts::new(g.values()[..=spec.n_max].to_vec())?;
                let p = recover_generators(&g)?;
                Ok(Self::explicit_exact(spec, p, g))
            }
            (SemigroupKind::ExplicitP, CountMode::Analysis) => {
                let q = spec.q.expect("validated");
                let values = need_table()?.generator_rationals()?;
                check_length(values.len(), spec.n_max)?;
                let qr = prec.int(q as i64);
                let lambda = normalized_lambda_from_p(&values[..spec.n_max], q, prec)?;
                let g_norm = normalized_from_lambda(&qr, &lambda, prec);
                Ok(Self::analysis(spec, AnalysisCounts { q: qr, g_norm, lambda }))
            }
            (SemigroupKind::ExplicitG, CountMode::Analysis) => {
                let q = spec.q.expect("validated");
                let values = need_table()?.element_rationals()?;
                check_length(values.len() - 1, spec.n_max)?;
                if values[0] != RBig::ONE {
                    return Err(Error::NotASemigroup {
                        degree: 0,
                        reason: "G(0) must be 1".into(),
                    });
                }
                let mut g_norm = Vec::with_capacity(spec.n_max + 1);
                let mut power = UBig::ONE;
                for (n, v) in values[..=spec.n_max].iter().enumerate() {
                    if v < &RBig::ZERO {
                        return Err(Error::NotASemigroup {
                            degree: n,
                            reason: "negative element count".into(),
                        });
                    }
                    g_norm.push(prec.rational(&(v / RBig::from(power.clone()))));
                    power *= UBig::from(q);
                }
                Ok(Self::from_normalized(spec, q, g_norm, None, prec))
            }
        }
    }

    fn explicit_exact(spec: SemigroupSpec, p: GeneratorCounts, g: ElementCounts) -> Self {
        let known_q = spec.q;
        Self {
            spec,
            counts: InstanceCounts::Exact { p, g },
            known_q,
            known_a: None,
        }
    }

    fn analysis(spec: SemigroupSpec, counts: AnalysisCounts) -> Self {
        let known_q = spec.q;
        Self {
            spec,
            counts: InstanceCounts::Analysis(counts),
            known_q,
            known_a: None,
        }
    }

    /// Analysis-mode instance with prescribed normalized counts `g(n) = G(n)/q^n`.
    pub fn from_normalized(
        spec: SemigroupSpec,
        q: u64,
        g_norm: Vec<Real>,
        known_a: Option<RBig>,
        prec: Precision,
    ) -> Self {
        let qr = prec.int(q as i64);
        let lambda = lambda_from_normalized(&qr, &g_norm, prec);
        let mut spec = spec;
        spec.mode = CountMode::Analysis;
        spec.q = Some(q);
        Self {
            spec,
            counts: InstanceCounts::Analysis(AnalysisCounts { q: qr, g_norm, lambda }),
            known_q: Some(q),
            known_a,
        }
    }

    /// Synthetic analysis-mode instance with `g(n) = a + residual(n)` for `n >= 1`.
    pub fn prescribed_residual(
        q: u64,
        n_max: usize,
        a: RBig,
        residual: impl Fn(usize) -> Real,
        prec: Precision,
    ) -> Self {
        let base = prec.rational(&a);
        let g_norm = std::iter::once(prec.one())
            .chain((1..=n_max).map(|n| &base + residual(n)))
            .collect();
        let spec = SemigroupSpec::explicit(SemigroupKind::ExplicitG, n_max, Some(q), CountMode::Analysis);
        Self::from_normalized(spec, q, g_norm, Some(a), prec)
    }

    pub fn n_max(&self) -> usize {
        self.spec.n_max
    }

    pub fn exact(&self) -> Option<(&GeneratorCounts, &ElementCounts)> {
        match &self.counts {
            InstanceCounts::Exact { p, g } => Some((p, g)),
            InstanceCounts::Analysis(_) => None,
        }
    }

    /// True when every generator count vanishes.
    pub fn is_degenerate(&self) -> bool {
        match &self.counts {
            InstanceCounts::Exact { p, .. } => p.is_zero(),
            InstanceCounts::Analysis(a) => a.lambda.iter().all(|l| *l == Real::ZERO),
        }
    }
}

fn check_length(available: usize, wanted: usize) -> Result<()> {
    if available < wanted {
        return Err(Error::InsufficientData(format!(
            "sequence file covers degrees up to {available}, n_max is {wanted}"
        )));
    }
    Ok(())
}

fn normalized_lambda_from_p(values: &[RBig], q: u64, prec: Precision) -> Result<Vec<Real>> {
    let mut power = UBig::ONE;
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if v < &RBig::ZERO {
                return Err(Error::NotASemigroup {
                    degree: i + 1,
                    reason: "negative generator count".into(),
                });
            }
            power *= UBig::from(q);
            let lambda = v * RBig::from(i + 1) / RBig::from(power.clone());
            Ok(prec.rational(&lambda))
        })
        .collect()
}

/// `A = prod_k (q^k / (q^k - 1))^(delta_k)`: the finite Euler factor the
/// perturbation multiplies into `H(y)` at `y = 1/q`.
fn perturbed_limit(q: u64, deltas: &[u64]) -> RBig {
    let q = UBig::from(q);
    let mut a = RBig::ONE;
    let mut qk = UBig::ONE;
    for &delta in deltas {
        qk *= &q;
        let factor = RBig::from_parts(qk.clone().into(), &qk - UBig::ONE);
        for _ in 0..delta {
            a *= &factor;
        }
    }
    a
}
