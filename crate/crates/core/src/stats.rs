//! Paired t-tests with three-symbol significance marking. The two-sided
//! p-value comes from the regularized incomplete beta function evaluated by
//! continued fraction.

use crate::schema::SchemaId;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Outcome of one paired t-test.
#[derive(Debug, Clone, PartialEq)]
pub struct TTestResult {
    pub n: usize,
    pub mean_diff: f64,
    pub t_statistic: f64,
    pub degrees_freedom: usize,
    /// Two-sided, in [0,1].
    pub p_value: f64,
    /// "", "*", "+" or "++".
    pub marker: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StatsError {
    LengthMismatch { a_len: usize, b_len: usize },
    TooFewSamples { n: usize },
    InvalidPValue { p: f64 },
    MissingBaseline { baseline: SchemaId },
    /// Topic sets differ between the two labeled samples.
    TopicMismatch { label: String, missing_from_a: Vec<String>, missing_from_b: Vec<String> },
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::LengthMismatch { a_len, b_len } => {
                write!(f, "paired samples differ in length: {a_len} vs {b_len}")
            }
            StatsError::TooFewSamples { n } => {
                write!(f, "paired t-test needs at least 2 samples, got {n}")
            }
            StatsError::InvalidPValue { p } => write!(f, "p-value {p} outside [0,1]"),
            StatsError::MissingBaseline { baseline } => {
                write!(f, "baseline schema {baseline} has no per-topic sample")
            }
            StatsError::TopicMismatch { label, missing_from_a, missing_from_b } => {
                write!(f, "topic sets differ for {label}:")?;
                if !missing_from_a.is_empty() {
                    write!(f, " missing from it: {}", missing_from_a.join(", "))?;
                }
                if !missing_from_b.is_empty() {
                    write!(f, " missing from its counterpart: {}", missing_from_b.join(", "))?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for StatsError {}

/// Strongest applicable significance symbol: "++" when p < 0.001, "+" when
/// p < 0.01, "*" when p ≤ 0.05 (boundary inclusive), "" otherwise.
pub fn marker(p: f64) -> Result<&'static str, StatsError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(StatsError::InvalidPValue { p });
    }
    Ok(if p < 0.001 {
        "++"
    } else if p < 0.01 {
        "+"
    } else if p <= 0.05 {
        "*"
    } else {
        ""
    })
}

/// Paired t-test of `a` against `b` (differences a − b), two-sided. All
/// differences zero yields the defined result t=0, p=1; a constant nonzero
/// difference yields t=±∞, p=0.
pub fn paired_t(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch { a_len: a.len(), b_len: b.len() });
    }
    let n = a.len();
    if n < 2 {
        return Err(StatsError::TooFewSamples { n });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n as f64 - 1.0);
    let sd = libm::sqrt(var);
    let df = n - 1;
    let (t, p) = if sd == 0.0 {
        if mean == 0.0 {
            (0.0, 1.0)
        } else if mean > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            (f64::NEG_INFINITY, 0.0)
        }
    } else {
        let t = mean / (sd / libm::sqrt(n as f64));
        (t, student_t_two_sided_p(t, df as f64))
    };
    Ok(TTestResult {
        n,
        mean_diff: mean,
        t_statistic: t,
        degrees_freedom: df,
        p_value: p,
        marker: marker(p)?,
    })
}

/// Two-sided Student-t tail probability: I_{ν/(ν+t²)}(ν/2, 1/2).
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    let p = incomplete_beta(df / 2.0, 0.5, x);
    p.clamp(0.0, 1.0)
}

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0,1],
/// by the symmetric continued-fraction form.
fn incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front = libm::exp(
        a * libm::log(x) + b * libm::log(1.0 - x)
            - (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)),
    );
    // The continued fraction converges fastest below the symmetry point.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - incomplete_beta(b, a, 1.0 - x)
    }
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-14;
    const MAX_ITER: usize = 400;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Lanczos approximation (g = 7, 9 coefficients).
fn ln_gamma(z: f64) -> f64 {
    // Coefficients kept digit-for-digit as published.
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    const PI: f64 = core::f64::consts::PI;
    if z < 0.5 {
        // Reflection formula.
        return libm::log(PI / libm::sin(PI * z)) - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * libm::log(2.0 * PI) + (z + 0.5) * libm::log(t) - t + libm::log(x)
}

/// Per-topic samples keyed by topic id.
pub type TopicSample = BTreeMap<String, f64>;

/// Aligns two topic-keyed samples by sorted topic id and runs the paired
/// test (a − b). Topic-set mismatches are an error naming `label` and
/// listing the differences.
pub fn paired_t_by_topic(
    label: &str,
    a: &TopicSample,
    b: &TopicSample,
) -> Result<TTestResult, StatsError> {
    let missing_from_a: Vec<String> =
        b.keys().filter(|t| !a.contains_key(*t)).cloned().collect();
    let missing_from_b: Vec<String> =
        a.keys().filter(|t| !b.contains_key(*t)).cloned().collect();
    if !missing_from_a.is_empty() || !missing_from_b.is_empty() {
        return Err(StatsError::TopicMismatch {
            label: label.into(),
            missing_from_a,
            missing_from_b,
        });
    }
    let sample_a: Vec<f64> = a.values().copied().collect();
    let sample_b: Vec<f64> = b.values().copied().collect();
    paired_t(&sample_a, &sample_b)
}

/// For every non-baseline schema, tests its per-topic sample against the
/// baseline's. The baseline never compares against itself.
pub fn compare_to_baseline(
    per_topic: &BTreeMap<SchemaId, TopicSample>,
    baseline: SchemaId,
) -> Result<BTreeMap<SchemaId, TTestResult>, StatsError> {
    let base = per_topic.get(&baseline).ok_or(StatsError::MissingBaseline { baseline })?;
    let mut out = BTreeMap::new();
    for (&schema, sample) in per_topic {
        if schema == baseline {
            continue;
        }
        out.insert(schema, paired_t_by_topic(&schema.to_string(), sample, base)?);
    }
    Ok(out)
}
