//! Verification suites and report rendering for the command-line driver.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charts::{integrability_check, q_cohomology, q_commutes_with_sigma, ChartInvolution, Cohomology};
use crate::fields::{
    binomial, mode_apply, q_diff, supercommutator, test_vectors, CompositeState, Homotopy, Sl2Modes,
};
use crate::gamma::{eta, koszul, super_bracket, GenMode, Kind};
use crate::linalg::int;
use crate::module::{
    act, enumerate_basis, l_zero, realized_fermions, singular_subspace, BaseMonomial, LaurentForm,
    TriDegree, VElement,
};
use crate::pairing::{
    chart_zero_self_annihilation, composite_contravariance, contravariance_check, gram_matrix, observed_complement,
    pair, partner, residue_pair, PairingReport,
};

/// Weights above this need an explicit override.
pub const SOFT_WEIGHT_CAP: i64 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Module,
    Fields,
    Pairing,
    Cohomology,
    Sl2,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Algebra, Suite::Module, Suite::Fields, Suite::Pairing, Suite::Cohomology, Suite::Sl2];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Module => "module",
            Suite::Fields => "fields",
            Suite::Pairing => "pairing",
            Suite::Cohomology => "cohomology",
            Suite::Sl2 => "sl2",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| ConfigError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Plain,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Format::Plain),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(ConfigError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown format `{0}`")]
    UnknownFormat(String),
    #[error("max weight must be non-negative, got {0}")]
    NegativeWeight(i64),
    #[error("degree pad must be at least 1, got {0}")]
    BadPad(i64),
    #[error("max weight {0} exceeds the soft cap {SOFT_WEIGHT_CAP}; pass --force-large to run anyway")]
    TooLarge(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub max_weight: i64,
    pub degree_pad: i64,
    pub format: Format,
    pub suites: BTreeSet<Suite>,
    pub seed: u64,
    pub force_large: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            max_weight: 3,
            degree_pad: 4,
            format: Format::Plain,
            suites: Suite::ALL.into_iter().collect(),
            seed: 0,
            force_large: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_weight < 0 {
            return Err(ConfigError::NegativeWeight(self.max_weight));
        }
        if self.degree_pad < 1 {
            return Err(ConfigError::BadPad(self.degree_pad));
        }
        if self.max_weight > SOFT_WEIGHT_CAP && !self.force_large {
            return Err(ConfigError::TooLarge(self.max_weight));
        }
        Ok(())
    }

    /// The default degree window `[-(T + pad), T + pad]`.
    pub fn window(&self) -> std::ops::RangeInclusive<i64> {
        let n = self.max_weight + self.degree_pad;
        -n..=n
    }

    /// Largest power of `e_0`, `f_0` tried on a weight-`w` vector.
    pub fn nilpotence_bound(&self, weight: i64) -> usize {
        (2 * weight + 3) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: String,
    /// The mathematical statement being checked.
    pub anchor: String,
    pub inputs: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

/// Shared, lazily computed objects for one run.
pub struct Context {
    pub config: RunConfig,
    cohomology: OnceLock<Cohomology>,
    sl2: OnceLock<Sl2Modes>,
    homotopy: OnceLock<Result<Homotopy, String>>,
}

impl Context {
    pub fn new(config: RunConfig) -> Self {
        Self { config, cohomology: OnceLock::new(), sl2: OnceLock::new(), homotopy: OnceLock::new() }
    }

    pub fn sigma(&self) -> &'static ChartInvolution {
        ChartInvolution::shared()
    }

    pub fn cohomology(&self) -> &Cohomology {
        self.cohomology.get_or_init(|| {
            Cohomology::compute(self.sigma(), self.config.max_weight, self.config.degree_pad)
                .expect("sigma preserves charge pieces")
        })
    }

    pub fn sl2(&self) -> &Sl2Modes {
        self.sl2.get_or_init(|| Sl2Modes::derive(2, -2..=2).expect("sl(2) zero modes solve"))
    }

    pub fn homotopy(&self) -> Result<&Homotopy, String> {
        self.homotopy
            .get_or_init(|| {
                Homotopy::solve(self.config.max_weight.max(1), self.config.window()).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn vectors(&self, max_weight: i64) -> Vec<VElement> {
        test_vectors(max_weight, self.config.window())
    }

    fn modes(&self, bound: i64) -> Vec<GenMode> {
        Kind::ALL.into_iter().flat_map(|k| (-bound..=bound).map(move |n| GenMode::new(k, n))).collect()
    }
}

fn run(suite: Suite, name: &str, anchor: &str, inputs: String, f: impl FnOnce() -> Result<String, String>) -> CheckResult {
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckResult { suite, name: name.to_string(), anchor: anchor.to_string(), inputs, passed, detail }
}

/// Collects the first few failures of an exhaustive scan.
fn scan<I, F>(items: I, f: F) -> Result<String, String>
where
    I: IntoParallelIterator,
    F: Fn(I::Item) -> Option<String> + Sync + Send,
{
    let mut failures: Vec<String> = items.into_par_iter().filter_map(f).collect();
    let checked_ok = failures.is_empty();
    failures.truncate(5);
    if checked_ok {
        Ok(String::new())
    } else {
        Err(failures.join("; "))
    }
}

fn counted(detail: Result<String, String>, count: usize, what: &str) -> Result<String, String> {
    detail.map(|_| format!("{count} {what}"))
}

// ---- algebra ----

fn algebra_checks(ctx: &Context) -> Vec<CheckResult> {
    let t = ctx.config.max_weight;
    let modes = ctx.modes(t + 1);
    let pairs: Vec<(GenMode, GenMode)> = modes.iter().flat_map(|&x| modes.iter().map(move |&y| (x, y))).collect();
    let range = format!("modes |n| <= {}", t + 1);
    vec![
        run(Suite::Algebra, "super-antisymmetry", "[y, x] = -(-1)^{xy} [x, y]", range.clone(), || {
            counted(
                scan(pairs.clone(), |(x, y)| {
                    (super_bracket(y, x) != -koszul(x.is_odd(), y.is_odd()) * super_bracket(x, y))
                        .then(|| format!("{x},{y}"))
                }),
                pairs.len(),
                "pairs",
            )
        }),
        run(
            Suite::Algebra,
            "eta-antiinvolution",
            "eta(eta x) = x and [eta y, eta x] = (-1)^{xy} eta([x, y])",
            range.clone(),
            || {
                counted(
                    scan(pairs.clone(), |(x, y)| {
                        let (ex, ey) = (eta(x), eta(y));
                        let back = eta(ex.gen);
                        let lhs = ex.coefficient() * ey.coefficient() * super_bracket(ey.gen, ex.gen);
                        let ok = back.gen == x
                            && ex.sign * back.sign == 1
                            && lhs == koszul(x.is_odd(), y.is_odd()) * super_bracket(x, y);
                        (!ok).then(|| format!("{x},{y}"))
                    }),
                    pairs.len(),
                    "pairs",
                )
            },
        ),
        run(
            Suite::Algebra,
            "bracket-realization",
            "x y - (-1)^{xy} y x acts on V as the central scalar [x, y]",
            format!("{range}, basis vectors of weight <= {t}, degrees in the default window"),
            || {
                let vectors = ctx.vectors(t);
                counted(
                    scan(vectors.clone(), |v| {
                        pairs.iter().find_map(|&(x, y)| {
                            let lhs = supercommutator(|u| act(x, u), x.is_odd(), |u| act(y, u), y.is_odd(), &v);
                            (lhs != v.scaled(&super_bracket(x, y))).then(|| format!("[{x},{y}] on {v}"))
                        })
                    }),
                    vectors.len() * pairs.len(),
                    "operator identities",
                )
            },
        ),
    ]
}

// ---- module ----

fn module_checks(ctx: &Context) -> Vec<CheckResult> {
    let t = ctx.config.max_weight;
    let inputs = format!("basis vectors of weight <= {t}, degrees in the default window");
    vec![
        run(Suite::Module, "l0-diagonal", "L0 v = (conformal weight of v) v", inputs.clone(), || {
            let vectors = ctx.vectors(t);
            counted(
                scan(vectors.clone(), |v| {
                    let w = v.max_weight().unwrap_or(0);
                    (l_zero(&v) != v.scaled(&int(w))).then(|| v.to_string())
                }),
                vectors.len(),
                "vectors",
            )
        }),
        run(Suite::Module, "grading-shifts", "x_n shifts (weight, fermion, degree) by (-n, f(x), deg x_n)", inputs.clone(), || {
            let vectors = ctx.vectors(t.min(2));
            let modes = ctx.modes(t + 1);
            scan(vectors, |v| {
                let d = v.iter().next().map(|(term, _)| term.tri_degree())?;
                modes.iter().find_map(|&x| {
                    let image = act(x, &v);
                    let want = TriDegree::new(d.weight - x.mode, d.fermion + x.fermion_shift(), d.degree + x.degree());
                    let ok = image.iter().all(|(term, _)| term.tri_degree() == want);
                    (!ok).then(|| format!("{x} on {v}"))
                })
            })
        }),
        run(
            Suite::Module,
            "singular-vectors",
            "the joint kernel of all positive modes is the weight-zero part",
            format!("weights 0..={t}, degrees in the default window"),
            || {
                let mut nonzero = 0;
                for w in 0..=t {
                    for (piece, sing) in singular_subspace(w, ctx.config.window()) {
                        let dim = enumerate_basis(piece).len();
                        let expected = if w == 0 { dim } else { 0 };
                        if sing.rank() != expected {
                            return Err(format!("{piece:?}: singular rank {} of {dim}", sing.rank()));
                        }
                        nonzero += 1;
                    }
                }
                Ok(format!("{nonzero} nonempty pieces"))
            },
        ),
    ]
}

// ---- fields ----

/// `:x_i y_j:` with annihilators on the right.
fn normal_ordered(x: GenMode, y: GenMode, v: &VElement) -> VElement {
    if x.is_field_annihilator() {
        act(y, &act(x, v)).scaled(&koszul(x.is_odd(), y.is_odd()))
    } else {
        act(x, &act(y, v))
    }
}

fn fields_checks(ctx: &Context) -> Vec<CheckResult> {
    let t = ctx.config.max_weight;
    let mut out = vec![run(
        Suite::Fields,
        "normal-ordered-modes",
        "(x_{-Δx} y)_n = Σ_i :x_i y_{n-i}:",
        "generator pairs x, y; |n| <= 2; basis vectors of weight <= 2".into(),
        || {
            let vectors = test_vectors(2, -4..=4);
            let mut count = 0;
            for x in Kind::ALL {
                for y in Kind::ALL {
                    let composite = act(GenMode::new(x, -x.field_weight()), CompositeState::generator(y).element());
                    if composite.is_zero() {
                        continue;
                    }
                    let u = CompositeState::new(composite).map_err(|e| e.to_string())?;
                    let failure = scan(vectors.clone(), |v| {
                        let w = v.max_weight().unwrap_or(0);
                        (-2..=2).find_map(|n| {
                            let mut rhs = VElement::zero();
                            for i in (n - w - 2)..=(w + 2) {
                                rhs.add_assign(&normal_ordered(GenMode::new(x, i), GenMode::new(y, n - i), &v));
                            }
                            (mode_apply(&u, n, &v) != rhs).then(|| format!("{x:?}{y:?} n={n} on {v}"))
                        })
                    });
                    failure?;
                    count += vectors.len() * 5;
                }
            }
            Ok(format!("{count} identities"))
        },
    )];
    out.push(run(
        Suite::Fields,
        "mode-commutator",
        "[x_m, u_n] = Σ_j C(m+Δx-1, j) (x_(j) u)_{m+n}",
        "Laurent and composite states of weight <= 1; |m|, |n| <= 2; weight <= 2".into(),
        || {
            let states = [
                VElement::base(BaseMonomial::function(-1)),
                VElement::base(BaseMonomial::function(2)),
                VElement::base(BaseMonomial::form(-2)),
                VElement::monomial(&[GenMode::a(-1)], BaseMonomial::function(2)),
                VElement::monomial(&[GenMode::psi(-1)], BaseMonomial::form(1)),
            ];
            let vectors = test_vectors(2, -2..=2);
            let mut count = 0;
            for s in states {
                let u = CompositeState::new(s.clone()).map_err(|e| e.to_string())?;
                let u_odd = s.iter().next().map(|(x, _)| x.is_odd()).unwrap_or(false);
                for kind in Kind::ALL {
                    let delta = kind.field_weight();
                    let products: Vec<(i64, CompositeState)> = (0..=(u.weight() + delta))
                        .filter_map(|j| {
                            let p = act(GenMode::new(kind, j - delta + 1), &s);
                            (!p.is_zero()).then(|| (j, CompositeState::new(p).expect("homogeneous")))
                        })
                        .collect();
                    scan(vectors.clone(), |v| {
                        for m in -2..=2 {
                            for n in -2..=2 {
                                let lhs = supercommutator(
                                    |w| act(GenMode::new(kind, m), w),
                                    kind.is_odd(),
                                    |w| mode_apply(&u, n, w),
                                    u_odd,
                                    &v,
                                );
                                let mut rhs = VElement::zero();
                                for (j, p) in &products {
                                    rhs.add_scaled(&binomial(m + delta - 1, *j), &mode_apply(p, m + n, &v));
                                }
                                if lhs != rhs {
                                    return Some(format!("{kind:?} m={m} u={s} n={n} v={v}"));
                                }
                            }
                        }
                        None
                    })?;
                    count += vectors.len() * 25;
                }
            }
            Ok(format!("{count} identities"))
        },
    ));
    let inputs = format!("basis vectors of weight <= {t}, degrees in the default window");
    out.push(run(Suite::Fields, "q-square", "Q^2 = 0, Q preserves weight and charge and raises fermion number", inputs.clone(), || {
        let vectors = ctx.vectors(t);
        counted(
            scan(vectors.clone(), |v| {
                let qv = q_diff(&v);
                let d = v.iter().next().map(|(x, _)| x.charge_degree())?;
                let graded =
                    qv.iter().all(|(x, _)| x.charge_degree().weight == d.weight && x.charge() == d.charge && x.fermion() == d.fermion + 1);
                (!q_diff(&qv).is_zero() || !graded).then(|| v.to_string())
            }),
            vectors.len(),
            "vectors",
        )
    }));
    out.push(run(Suite::Fields, "homotopy", "Q G0 + G0 Q = L0 and G0^2 = 0", inputs, || {
        let g = ctx.homotopy()?;
        let vectors = ctx.vectors(t);
        let res = scan(vectors.clone(), |v| {
            let gv = g.apply(&v).ok()?;
            let lhs = q_diff(&gv).plus(&g.apply(&q_diff(&v)).ok()?);
            let weight_zero_ok = v.max_weight() != Some(0) || gv.is_zero();
            (lhs != l_zero(&v) || !g.apply(&gv).ok()?.is_zero() || !weight_zero_ok).then(|| v.to_string())
        });
        res?;
        let coeffs: Vec<String> = g.coefficients().iter().map(|(j, c)| format!("c[{j}]={c}")).collect();
        let uniqueness = if g.nullity == 0 { "unique".to_string() } else { format!("NOT unique, nullity {}", g.nullity) };
        Ok(format!("{} vectors; G0 = Σ c_j psi(-j) b(j) with {} ({uniqueness})", vectors.len(), coeffs.join(", ")))
    }));
    out
}

// ---- pairing ----

fn pairing_checks(ctx: &Context) -> Vec<CheckResult> {
    let t = ctx.config.max_weight;
    let seed = ctx.config.seed;
    vec![
        run(Suite::Pairing, "residue", "<b^m, b^{-m-1} db> = Res b^{-1} db = 1", "m in [-8, 8]".into(), || {
            for m in -8..=8 {
                let f = LaurentForm::monomial(BaseMonomial::function(m), int(1));
                let g = LaurentForm::monomial(BaseMonomial::form(-m - 1), int(1));
                if residue_pair(&f, &g) != int(1) || residue_pair(&g, &f) != int(1) {
                    return Err(format!("m = {m}"));
                }
            }
            Ok("17 exponents".into())
        }),
        run(
            Suite::Pairing,
            "contravariance",
            "<x v, w> = (-1)^{xv} <v, eta(x) w> and <v, w> = (-1)^{vw} <w, v>",
            format!("240 seeded random homogeneous pairs of weight <= {t}, seed {seed}"),
            || {
                let r = contravariance_check(240, seed, t);
                if r.passed() {
                    Ok(format!("{} pairs, {} with nonzero pairing", r.samples, r.nontrivial))
                } else {
                    Err(r.counterexamples.join("; "))
                }
            },
        ),
        run(
            Suite::Pairing,
            "q-contravariance",
            "<Q v, w> = (-1)^v <v, eta(Q) w> with eta(Q) = -Q",
            format!("seeded random homogeneous pairs of weight <= {t}"),
            || {
                let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed ^ 0x51);
                let vectors = test_vectors(t, -(t + 2)..=(t + 2));
                let mut nontrivial = 0;
                for _ in 0..200 {
                    let v = &vectors[rand::Rng::gen_range(&mut rng, 0..vectors.len())];
                    let qv = q_diff(v);
                    let Some((term, _)) = qv.iter().next() else { continue };
                    let basis = enumerate_basis(partner(term.tri_degree()));
                    if basis.is_empty() {
                        continue;
                    }
                    let w = VElement::term(basis[rand::Rng::gen_range(&mut rng, 0..basis.len())].clone());
                    let odd = v.iter().next().map(|(x, _)| x.is_odd()).unwrap_or(false);
                    let lhs = pair(&qv, &w);
                    let rhs = koszul(true, odd) * pair(v, &q_diff(&w).scaled(&int(-1)));
                    if lhs != rhs {
                        return Err(format!("v={v} w={w}: {lhs} vs {rhs}"));
                    }
                    nontrivial += usize::from(!lhs.is_zero());
                }
                Ok(format!("200 samples, {nontrivial} nonzero"))
            },
        ),
        run(
            Suite::Pairing,
            "chart-zero-annihilator",
            "the annihilator of the sections regular at zero is exactly those sections",
            format!("every piece of weight <= {t} in the default window"),
            || {
                let r = chart_zero_self_annihilation(t, ctx.config.window());
                if r.passed() {
                    Ok(format!("{} pieces, {} with nonzero chart-zero partner", r.samples, r.nontrivial))
                } else {
                    Err(r.counterexamples.join("; "))
                }
            },
        ),
        run(
            Suite::Pairing,
            "piece-duality",
            "each piece (i, p, d) pairs nondegenerately with (i, 1-p, -d-1-2i) and with no other piece",
            format!("pieces of weight <= {t} in the default window; complements scanned for weight <= {}", t.min(2)),
            || {
                let mut pieces = Vec::new();
                for w in 0..=t {
                    for p in realized_fermions(w) {
                        for d in ctx.config.window() {
                            let piece = TriDegree::new(w, p, d);
                            if !enumerate_basis(piece).is_empty() {
                                pieces.push(piece);
                            }
                        }
                    }
                }
                let n = pieces.len();
                scan(pieces, |piece| {
                    if !gram_matrix(piece, partner(piece)).nondegenerate {
                        return Some(format!("{piece:?} degenerate"));
                    }
                    if piece.weight <= 2 {
                        let window = (partner(piece).degree - 3)..=(partner(piece).degree + 3);
                        let seen = observed_complement(piece, window);
                        if seen != vec![partner(piece).degree] {
                            return Some(format!("{piece:?} pairs with degrees {seen:?}"));
                        }
                    }
                    None
                })
                .map(|_| format!("{n} pieces"))
            },
        ),
    ]
}

// ---- cohomology ----

fn cohomology_checks(ctx: &Context) -> Vec<CheckResult> {
    let t = ctx.config.max_weight;
    let window = format!("charge window ±{}, re-run at ±{}", t + ctx.config.degree_pad, t + 2 * ctx.config.degree_pad);
    let mut out = Vec::new();
    out.push(run(
        Suite::Cohomology,
        "transformed-generators",
        "modes of b^-1, -b^-2 db, -psi(-1) b^2, -a(-1) b^2 + λ psi(-1) b db satisfy the defining brackets",
        "λ solved on weight <= 2, all brackets re-checked on weight <= 3, |i|, |j| <= 2, degrees [-2, 2]".into(),
        || {
            let g = &ctx.sigma().generators;
            let vectors = test_vectors(3.min(t.max(2)), -2..=2);
            let failures: Vec<String> = vectors
                .par_chunks(8)
                .flat_map(|chunk| g.relation_failures(chunk, 2))
                .collect();
            if !failures.is_empty() {
                return Err(failures.into_iter().take(5).collect::<Vec<_>>().join("; "));
            }
            let flag = if g.unique { "unique" } else { "NOT unique" };
            Ok(format!("λ = {} ({flag}), {} vectors", g.lambda, vectors.len()))
        },
    ));
    out.push(run(
        Suite::Cohomology,
        "sigma-involution",
        "sigma(sigma(v)) = v, sigma reverses charge",
        format!("basis vectors of weight <= {t}, degrees in the default window"),
        || {
            let vectors = ctx.vectors(t);
            counted(
                scan(vectors.clone(), |v| {
                    let sv = ctx.sigma().sigma(&v);
                    let c = v.iter().next().map(|(x, _)| x.charge())?;
                    let reversed = sv.iter().all(|(x, _)| x.charge() == -c);
                    (ctx.sigma().sigma(&sv) != v || !reversed).then(|| v.to_string())
                }),
                vectors.len(),
                "vectors",
            )
        },
    ));
    out.push(run(
        Suite::Cohomology,
        "sigma-intertwining",
        "sigma(x_j v) = x~_j sigma(v) for every generator",
        "|j| <= 2, basis vectors of weight <= 2, degrees [-3, 3]".into(),
        || {
            let vectors = test_vectors(2, -3..=3);
            let modes = ctx.modes(2);
            let sigma = ctx.sigma();
            let r = scan(vectors.clone(), |v| {
                let sv = sigma.sigma(&v);
                modes.iter().find_map(|&x| {
                    (sigma.sigma(&act(x, &v)) != sigma.generators.apply(x, &sv)).then(|| format!("{x} on {v}"))
                })
            });
            let q = q_commutes_with_sigma(sigma, &vectors);
            r?;
            if !q.is_empty() {
                return Err(format!("Q does not commute with sigma on {}", q[0]));
            }
            Ok(format!("{} vectors; Q commutes with sigma", vectors.len()))
        },
    ));
    out.push(run(
        Suite::Cohomology,
        "hodge-weight-zero",
        "at weight 0 the Čech cohomology is the Hodge cohomology of P^1: (h0, h1) = (1, 0) for p = 0 and (0, 1) for p = 1",
        window.clone(),
        || {
            let h = ctx.cohomology();
            let get = |p| h.entry(0, p).map(|e| (e.h0, e.h1)).unwrap_or((0, 0));
            let (d0, d1) = (get(0), get(1));
            if d0 == (1, 0) && d1 == (0, 1) {
                Ok(format!("p=0: {d0:?}, p=1: {d1:?}"))
            } else {
                Err(format!("p=0: {d0:?}, p=1: {d1:?}"))
            }
        },
    ));
    out.push(run(
        Suite::Cohomology,
        "duality-table",
        "h0(i, p) = h1(i, 1-p)",
        format!("weights <= {t}, {window}"),
        || {
            let h = ctx.cohomology();
            let failures = h.duality_failures();
            let unstable: Vec<String> =
                h.entries.iter().filter(|e| !e.stable).map(|e| format!("({},{}) unstable", e.weight, e.fermion)).collect();
            if failures.is_empty() && unstable.is_empty() {
                Ok(format!("{} sectors, all window-stable", h.entries.len()))
            } else {
                Err(failures.into_iter().chain(unstable).collect::<Vec<_>>().join("; "))
            }
        },
    ));
    out.push(run(
        Suite::Cohomology,
        "cohomology-pairing",
        "H0(i, p) x H1(i, 1-p) -> C is a perfect pairing",
        format!("weights <= {t}"),
        || {
            let h = ctx.cohomology();
            let blocks: Vec<PairingReport> = h.entries.iter().map(|e| h.pairing(e.weight, e.fermion)).collect();
            let bad: Vec<String> = blocks
                .iter()
                .filter(|b| !(b.rows == b.cols && b.rank == b.rows))
                .map(|b| format!("({},{}) {}x{} rank {}", b.left.weight, b.left.fermion, b.rows, b.cols, b.rank))
                .collect();
            let w0 = h.pairing(0, 0);
            if w0.gram != vec![vec!["1".to_string()]] {
                return Err(format!("weight-0 block {:?}", w0.gram));
            }
            if bad.is_empty() {
                Ok(format!("{} blocks square and of full rank; weight-0 block [1]", blocks.len()))
            } else {
                Err(bad.join("; "))
            }
        },
    ));
    out.push(run(
        Suite::Cohomology,
        "q-cohomology",
        "Q-cohomology of H0 + H1 is the de Rham cohomology of P^1: total dimension 2, all in weight 0",
        format!("weights <= {t}"),
        || {
            let q = q_cohomology(ctx.cohomology());
            let detail = format!("total {}, weight 0: {}, classes {:?}", q.total, q.weight_zero, q.classes);
            if q.total == 2 && q.weight_zero == 2 && q.q_squared_zero {
                Ok(detail)
            } else {
                Err(detail)
            }
        },
    ));
    out
}

// ---- sl2 ----

fn sl2_checks(ctx: &Context) -> Vec<CheckResult> {
    let t = ctx.config.max_weight;
    let mut out = Vec::new();
    out.push(run(
        Suite::Sl2,
        "sl2-relations",
        "[e0, f0] = h0, [h0, e0] = 2 e0, [h0, f0] = -2 f0; classical limits d/db, -2b d/db, -b^2 d/db",
        "coefficients solved on weight <= 2; relations checked on weight <= 3, degrees [-3, 3]".into(),
        || {
            let s = ctx.sl2();
            let vectors = test_vectors(t.min(3), -3..=3);
            scan(vectors.clone(), |v| {
                let ef = supercommutator(|x| s.e.apply(x), false, |x| s.f.apply(x), false, &v);
                let he = supercommutator(|x| s.h.apply(x), false, |x| s.e.apply(x), false, &v);
                let hf = supercommutator(|x| s.h.apply(x), false, |x| s.f.apply(x), false, &v);
                let ok = ef == s.h.apply(&v)
                    && he == s.e.apply(&v).scaled(&int(2))
                    && hf == s.f.apply(&v).scaled(&int(-2));
                (!ok).then(|| v.to_string())
            })?;
            for m in -4..=4 {
                let f = VElement::base(BaseMonomial::function(m));
                if s.f.apply(&f) != VElement::base(BaseMonomial::function(m + 1)).scaled(&int(-m))
                    || s.e.apply(&f) != VElement::base(BaseMonomial::function(m - 1)).scaled(&int(m))
                    || s.h.apply(&f) != f.scaled(&int(-2 * m))
                {
                    return Err(format!("classical action on b^{m}"));
                }
            }
            let [al, be, ga, de] = &s.coefficients;
            let flag = if s.nullity == 0 { "unique" } else { "NOT unique" };
            Ok(format!(
                "{} vectors; h = {al} a(-1) b + {be} psi(-1) db, f = {ga} a(-1) b^2 + {de} psi(-1) b db ({flag})",
                vectors.len()
            ))
        },
    ));
    out.push(run(
        Suite::Sl2,
        "sl2-contravariance",
        "<X v, w> = <v, eta(X) w> with eta(X) = -X for X = e0, h0, f0",
        format!("seeded random pairs of weight <= {t}"),
        || {
            let s = ctx.sl2();
            let vectors = test_vectors(t.min(2), -2..=2);
            let mut total = 0;
            for (name, op) in s.operators() {
                let eta_op = op.words(t).eta();
                for v in &vectors {
                    if eta_op.apply(v) != op.apply(v).scaled(&int(-1)) {
                        return Err(format!("eta({name}) != -{name} on {v}"));
                    }
                }
                let r = composite_contravariance(op, 70, ctx.config.seed, t);
                if !r.passed() {
                    return Err(r.counterexamples.join("; "));
                }
                total += r.samples;
            }
            Ok(format!("{total} sampled pairs"))
        },
    ));
    out.push(run(
        Suite::Sl2,
        "integrability",
        "e0 and f0 are locally nilpotent on H0, h0 acts semisimply with integer eigenvalues, and f0 is not locally nilpotent on V",
        format!("H0 basis of weight <= {t}; bound N <= 2 weight + 3"),
        || {
            let r = integrability_check(ctx.cohomology(), ctx.sl2(), |w| ctx.config.nilpotence_bound(w));
            if r.passed() {
                let witnesses: Vec<String> = r.witnesses.iter().map(|(w, v)| format!("weight {w}: {v}")).collect();
                Ok(format!(
                    "{} vectors, max exponent {}; non-nilpotent witnesses {}",
                    r.vectors_checked,
                    r.max_exponent,
                    witnesses.join(", ")
                ))
            } else {
                Err(r.failures.into_iter().take(5).collect::<Vec<_>>().join("; "))
            }
        },
    ));
    out
}

pub fn suite_checks(ctx: &Context, suite: Suite) -> Vec<CheckResult> {
    match suite {
        Suite::Algebra => algebra_checks(ctx),
        Suite::Module => module_checks(ctx),
        Suite::Fields => fields_checks(ctx),
        Suite::Pairing => pairing_checks(ctx),
        Suite::Cohomology => cohomology_checks(ctx),
        Suite::Sl2 => sl2_checks(ctx),
    }
}

/// Runs the selected suites; checks are reported in suite order.
pub fn verify(config: &RunConfig) -> Report {
    let ctx = Context::new(config.clone());
    let suites: Vec<Suite> = config.suites.iter().copied().collect();
    let checks: Vec<CheckResult> = suites.par_iter().map(|&s| suite_checks(&ctx, s)).collect::<Vec<_>>().concat();
    let passed = checks.iter().all(|c| c.passed);
    Report { config: config.clone(), checks, passed }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterRow {
    pub weight: i64,
    pub fermion: i64,
    pub h0: usize,
    pub h1: usize,
}

pub fn characters(cohomology: &Cohomology) -> Vec<CharacterRow> {
    cohomology
        .entries
        .iter()
        .map(|e| CharacterRow { weight: e.weight, fermion: e.fermion, h0: e.h0, h1: e.h1 })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingBlock {
    pub weight: i64,
    pub fermion: i64,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub nondegenerate: bool,
    pub gram: Vec<Vec<String>>,
}

pub fn pairing_table(cohomology: &Cohomology) -> Vec<PairingBlock> {
    cohomology
        .entries
        .iter()
        .map(|e| {
            let r = cohomology.pairing(e.weight, e.fermion);
            PairingBlock {
                weight: e.weight,
                fermion: e.fermion,
                rows: r.rows,
                cols: r.cols,
                rank: r.rank,
                nondegenerate: r.nondegenerate,
                gram: r.gram,
            }
        })
        .collect()
}

/// Serializes through `serde_json::Value`, whose sorted keys make the output
/// a fixed point of parse-and-reserialize.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header).expect("in-memory write");
    }
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn render_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row<'a> {
                suite: Suite,
                check: &'a str,
                passed: bool,
                anchor: &'a str,
                detail: &'a str,
            }
            let rows: Vec<Row> = report
                .checks
                .iter()
                .map(|c| Row { suite: c.suite, check: &c.name, passed: c.passed, anchor: &c.anchor, detail: &c.detail })
                .collect();
            to_csv(&rows, &["suite", "check", "passed", "anchor", "detail"])
        }
        Format::Plain => {
            let mut s = String::new();
            for c in &report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!("{status} {}/{}: {}\n", c.suite, c.name, c.anchor));
                s.push_str(&format!("     inputs: {}\n", c.inputs));
                if !c.detail.is_empty() {
                    s.push_str(&format!("     {}\n", c.detail));
                }
            }
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            s.push_str(&format!("{} checks, {} failed\n", report.checks.len(), failed));
            s
        }
    }
}

pub fn render_characters(rows: &[CharacterRow], format: Format) -> String {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => to_csv(rows, &["weight", "fermion", "h0", "h1"]),
        Format::Plain => {
            let mut s = format!("{:>6} {:>7} {:>5} {:>5}\n", "weight", "fermion", "h0", "h1");
            for r in rows {
                s.push_str(&format!("{:>6} {:>7} {:>5} {:>5}\n", r.weight, r.fermion, r.h0, r.h1));
            }
            s
        }
    }
}

pub fn render_pairing_table(blocks: &[PairingBlock], format: Format) -> String {
    match format {
        Format::Json => to_json(&blocks),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                weight: i64,
                fermion: i64,
                rows: usize,
                cols: usize,
                rank: usize,
                nondegenerate: bool,
                entries: String,
            }
            let rows: Vec<Row> = blocks
                .iter()
                .map(|b| Row {
                    weight: b.weight,
                    fermion: b.fermion,
                    rows: b.rows,
                    cols: b.cols,
                    rank: b.rank,
                    nondegenerate: b.nondegenerate,
                    entries: b.gram.iter().map(|r| r.join(" ")).collect::<Vec<_>>().join(";"),
                })
                .collect();
            to_csv(&rows, &["weight", "fermion", "rows", "cols", "rank", "nondegenerate", "entries"])
        }
        Format::Plain => {
            let mut s = String::new();
            for b in blocks {
                s.push_str(&format!(
                    "H0({w},{p}) x H1({w},{q}): {r}x{c}, rank {k}{flag}\n",
                    w = b.weight,
                    p = b.fermion,
                    q = 1 - b.fermion,
                    r = b.rows,
                    c = b.cols,
                    k = b.rank,
                    flag = if b.rows == b.cols && b.rank == b.rows { "" } else { "  DEGENERATE" }
                ));
                for row in &b.gram {
                    s.push_str(&format!("  [{}]\n", row.join(" ")));
                }
            }
            s
        }
    }
}

pub fn render_cohomology(cohomology: &Cohomology, format: Format) -> String {
    match format {
        Format::Json => to_json(&cohomology.entries),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                weight: i64,
                fermion: i64,
                h0: usize,
                h1: usize,
                window: i64,
                h0_enlarged: usize,
                h1_enlarged: usize,
                stable: bool,
            }
            let rows: Vec<Row> = cohomology
                .entries
                .iter()
                .map(|e| Row {
                    weight: e.weight,
                    fermion: e.fermion,
                    h0: e.h0,
                    h1: e.h1,
                    window: e.window,
                    h0_enlarged: e.h0_enlarged,
                    h1_enlarged: e.h1_enlarged,
                    stable: e.stable,
                })
                .collect();
            to_csv(&rows, &["weight", "fermion", "h0", "h1", "window", "h0_enlarged", "h1_enlarged", "stable"])
        }
        Format::Plain => {
            let mut s = String::new();
            for e in &cohomology.entries {
                s.push_str(&format!(
                    "weight {} fermion {}: h0 = {}, h1 = {} (charge window ±{}; enlarged run {} / {}{})\n",
                    e.weight,
                    e.fermion,
                    e.h0,
                    e.h1,
                    e.window,
                    e.h0_enlarged,
                    e.h1_enlarged,
                    if e.stable { "" } else { ", UNSTABLE" }
                ));
                for v in &e.h0_basis {
                    s.push_str(&format!("  H0: {v}\n"));
                }
                for v in &e.h1_representatives {
                    s.push_str(&format!("  H1: [{v}]\n"));
                }
            }
            s
        }
    }
}
