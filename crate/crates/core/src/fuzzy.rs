//! Fuzzy-set primitives: trapezoidal membership functions, Ruspini
//! partitions of the unit interval and the two supported t-norms.
//!
//! Every numeric attribute is normalized to `[0, 1]` before it reaches this
//! module, so partitions always cover exactly that interval. Values that fall
//! outside it (test projects beyond the training range) are clamped.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Tolerance used when checking that memberships of a partition sum to one.
pub const RUSPINI_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum FuzzyError {
    #[error("membership degree {0} is outside [0, 1]")]
    DegreeOutOfRange(f64),
    #[error("a partition needs at least one fuzzy set")]
    EmptyPartition,
    #[error("invalid trapezoid {label}: {reason}")]
    InvalidSet { label: String, reason: String },
    #[error("partition memberships sum to {sum} at x = {x}")]
    NotRuspini { x: f64, sum: f64 },
    #[error("unknown t-norm {0:?} (expected product or minimum)")]
    UnknownTNorm(String),
    #[error("partition line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// A trapezoid `(a, b, c, d)` over the normalized domain.
///
/// Membership is 1 on the core `[b, c]`, 0 outside the support `[a, d]` and
/// linear on the two ramps. Shoulder sets have `a == b` or `c == d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapezoidalSet {
    label: String,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl TrapezoidalSet {
    pub fn new(label: impl Into<String>, a: f64, b: f64, c: f64, d: f64) -> Result<Self, FuzzyError> {
        let label = label.into();
        let invalid = |reason: &str| FuzzyError::InvalidSet {
            label: label.clone(),
            reason: reason.to_string(),
        };
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(invalid("coordinates must be finite"));
        }
        if !(a <= b && b <= c && c <= d) {
            return Err(invalid("coordinates must satisfy a <= b <= c <= d"));
        }
        if a < 0.0 || d > 1.0 {
            return Err(invalid("support must lie within [0, 1]"));
        }
        Ok(Self { label, a, b, c, d })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The four abscissae `(a, b, c, d)`.
    pub fn coords(&self) -> (f64, f64, f64, f64) {
        (self.a, self.b, self.c, self.d)
    }

    /// Membership degree of `x`, clamped into `[0, 1]` first.
    ///
    /// NaN has no meaningful degree and evaluates to 0.
    pub fn membership(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        if self.b <= x && x <= self.c {
            1.0
        } else if x <= self.a || x >= self.d || x.is_nan() {
            0.0
        } else if x < self.b {
            (x - self.a) / (self.b - self.a)
        } else {
            (self.d - x) / (self.d - self.c)
        }
    }

    /// Midpoint of the core.
    pub fn core_midpoint(&self) -> f64 {
        0.5 * (self.b + self.c)
    }

    /// Center of gravity of the trapezoid's area.
    pub fn centroid(&self) -> f64 {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let denom = 3.0 * (c + d - a - b);
        if denom == 0.0 {
            // zero-area set: a single point
            return a;
        }
        (c * c + c * d + d * d - a * a - a * b - b * b) / denom
    }
}

/// An ordered family of trapezoids covering `[0, 1]` whose memberships sum
/// to one everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyPartition {
    sets: Vec<TrapezoidalSet>,
}

impl FuzzyPartition {
    /// Validates and wraps an explicit list of sets.
    pub fn new(sets: Vec<TrapezoidalSet>) -> Result<Self, FuzzyError> {
        let (first, last) = match (sets.first(), sets.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(FuzzyError::EmptyPartition),
        };
        if first.a != 0.0 || first.b != 0.0 {
            return Err(FuzzyError::InvalidSet {
                label: first.label.clone(),
                reason: "first set must have a left shoulder at 0".into(),
            });
        }
        if last.c != 1.0 || last.d != 1.0 {
            return Err(FuzzyError::InvalidSet {
                label: last.label.clone(),
                reason: "last set must have a right shoulder at 1".into(),
            });
        }
        for pair in sets.windows(2) {
            if pair[0].c >= pair[1].b {
                return Err(FuzzyError::InvalidSet {
                    label: pair[1].label.clone(),
                    reason: "cores must be disjoint and ordered left to right".into(),
                });
            }
        }
        let partition = Self { sets };
        partition.check_ruspini()?;
        Ok(partition)
    }

    /// `n` equally sized trapezoids with 0.5 crossovers.
    ///
    /// The unit interval is cut into `3n - 1` equal steps: each core spans two
    /// steps and each ramp between neighbours spans one, so set `i` is
    /// `((3i-1)/m, 3i/m, (3i+2)/m, (3i+3)/m)` with `m = 3n - 1`, clipped to the
    /// shoulders at the ends.
    pub fn uniform(n: usize) -> Result<Self, FuzzyError> {
        if n == 0 {
            return Err(FuzzyError::EmptyPartition);
        }
        let steps = (3 * n - 1) as f64;
        let at = |k: isize| -> f64 { (k.max(0) as f64 / steps).min(1.0) };
        let sets = (0..n)
            .map(|i| {
                let k = 3 * i as isize;
                TrapezoidalSet {
                    label: format!("fs{}", i + 1),
                    a: at(k - 1),
                    b: at(k),
                    c: at(k + 2),
                    d: at(k + 3),
                }
            })
            .collect();
        Ok(Self { sets })
    }

    pub fn sets(&self) -> &[TrapezoidalSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Membership of `x` in every set, in partition order.
    pub fn fuzzify(&self, x: f64) -> Vec<f64> {
        self.sets.iter().map(|s| s.membership(x)).collect()
    }

    pub fn centroids(&self) -> Vec<f64> {
        self.sets.iter().map(TrapezoidalSet::centroid).collect()
    }

    fn check_ruspini(&self) -> Result<(), FuzzyError> {
        let grid = (0..=1000).map(|i| i as f64 / 1000.0);
        let breakpoints = self.sets.iter().flat_map(|s| [s.a, s.b, s.c, s.d]);
        for x in grid.chain(breakpoints) {
            let sum: f64 = self.fuzzify(x).iter().sum();
            if (sum - 1.0).abs() > RUSPINI_TOLERANCE {
                return Err(FuzzyError::NotRuspini { x, sum });
            }
        }
        Ok(())
    }

    /// Plain-text dump: one `label,a,b,c,d` line per set, 9 decimals.
    pub fn to_text(&self) -> String {
        self.sets
            .iter()
            .map(|s| format!("{},{:.9},{:.9},{:.9},{:.9}\n", s.label, s.a, s.b, s.c, s.d))
            .collect()
    }

    /// Parses the format written by [`FuzzyPartition::to_text`].
    pub fn from_text(text: &str) -> Result<Self, FuzzyError> {
        let mut sets = Vec::new();
        for (idx, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let parse_err = |reason: String| FuzzyError::Parse { line: idx + 1, reason };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(parse_err(format!("expected 5 fields, found {}", fields.len())));
            }
            let mut coords = [0.0; 4];
            for (slot, raw) in coords.iter_mut().zip(&fields[1..]) {
                *slot = raw.parse().map_err(|_| parse_err(format!("not a number: {raw:?}")))?;
            }
            let [a, b, c, d] = coords;
            sets.push(TrapezoidalSet::new(fields[0], a, b, c, d)?);
        }
        Self::new(sets)
    }
}

/// Fuzzy conjunction operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum TNormKind {
    #[default]
    Product,
    Minimum,
}

impl TNormKind {
    /// Applies the t-norm without range checks.
    #[inline]
    pub fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            TNormKind::Product => a * b,
            TNormKind::Minimum => a.min(b),
        }
    }

    /// Range-checked t-norm of two degrees.
    pub fn apply(self, a: f64, b: f64) -> Result<f64, FuzzyError> {
        for v in [a, b] {
            if !(0.0..=1.0).contains(&v) {
                return Err(FuzzyError::DegreeOutOfRange(v));
            }
        }
        Ok(self.combine(a, b))
    }
}

impl fmt::Display for TNormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TNormKind::Product => "product",
            TNormKind::Minimum => "minimum",
        })
    }
}

impl FromStr for TNormKind {
    type Err = FuzzyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "product" | "prod" => Ok(TNormKind::Product),
            "minimum" | "min" => Ok(TNormKind::Minimum),
            other => Err(FuzzyError::UnknownTNorm(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sample_set() -> TrapezoidalSet {
        TrapezoidalSet::new("t", 0.0, 0.1, 0.3, 0.4).unwrap()
    }

    #[test]
    fn trapezoid_membership_examples() {
        let s = sample_set();
        assert_eq!(s.membership(0.2), 1.0);
        assert_abs_diff_eq!(s.membership(0.05), 0.5, epsilon = 1e-12);
        assert_eq!(s.membership(0.9), 0.0);
    }

    #[test]
    fn membership_clamps_out_of_range_input() {
        let p = FuzzyPartition::uniform(3).unwrap();
        assert_eq!(p.fuzzify(-4.0), p.fuzzify(0.0));
        assert_eq!(p.fuzzify(7.5), p.fuzzify(1.0));
    }

    #[test]
    fn rejects_unordered_coordinates() {
        assert!(TrapezoidalSet::new("x", 0.2, 0.1, 0.3, 0.4).is_err());
        assert!(TrapezoidalSet::new("x", 0.0, 0.1, 0.3, 1.5).is_err());
        assert!(TrapezoidalSet::new("x", f64::NAN, 0.1, 0.3, 0.4).is_err());
    }

    #[test]
    fn tnorm_examples() {
        assert_eq!(TNormKind::Product.apply(0.5, 0.5).unwrap(), 0.25);
        assert_eq!(TNormKind::Minimum.apply(0.3, 0.7).unwrap(), 0.3);
        for kind in [TNormKind::Product, TNormKind::Minimum] {
            assert_eq!(kind.apply(0.37, 1.0).unwrap(), 0.37);
        }
        assert_eq!(
            TNormKind::Product.apply(1.2, 0.5),
            Err(FuzzyError::DegreeOutOfRange(1.2))
        );
        assert!(TNormKind::Minimum.apply(0.5, -0.1).is_err());
        assert_eq!(TNormKind::default(), TNormKind::Product);
        assert_eq!("min".parse::<TNormKind>().unwrap(), TNormKind::Minimum);
        assert!("lukasiewicz".parse::<TNormKind>().is_err());
    }

    #[test]
    fn uniform_partition_single_set_covers_everything() {
        let p = FuzzyPartition::uniform(1).unwrap();
        assert_eq!(p.len(), 1);
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(p.fuzzify(x), vec![1.0]);
        }
    }

    #[test]
    fn uniform_partition_two_sets() {
        let p = FuzzyPartition::uniform(2).unwrap();
        assert_eq!(p.fuzzify(0.0), vec![1.0, 0.0]);
        assert_eq!(p.fuzzify(1.0), vec![0.0, 1.0]);
        let v = p.fuzzify(0.5);
        assert_abs_diff_eq!(v[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn uniform_partition_zero_is_an_error() {
        assert_eq!(FuzzyPartition::uniform(0), Err(FuzzyError::EmptyPartition));
    }

    #[test]
    fn seven_set_partition_sums_to_one_on_grid() {
        let p = FuzzyPartition::uniform(7).unwrap();
        for i in 0..1000 {
            let x = i as f64 / 999.0;
            let sum: f64 = p.fuzzify(x).iter().sum();
            assert!((sum - 1.0).abs() <= RUSPINI_TOLERANCE, "x={x} sum={sum}");
        }
    }

    #[test]
    fn fuzzify_matches_elementwise_membership() {
        let p = FuzzyPartition::uniform(7).unwrap();
        let v = p.fuzzify(0.31);
        for (deg, set) in v.iter().zip(p.sets()) {
            assert_eq!(*deg, set.membership(0.31));
        }
        assert!((v.iter().sum::<f64>() - 1.0).abs() <= RUSPINI_TOLERANCE);
        // m = 20 steps: 0.31 sits in the core of fs3, 0.27 on the fs2/fs3 ramp
        assert_eq!(v.iter().filter(|d| **d > 0.0).count(), 1);
        let ramp = p.fuzzify(0.27);
        assert_abs_diff_eq!(ramp[1], 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(ramp[2], 0.4, epsilon = 1e-12);
    }

    #[test]
    fn adjacent_sets_share_ramp_endpoints() {
        let p = FuzzyPartition::uniform(11).unwrap();
        for pair in p.sets().windows(2) {
            let (_, _, c0, d0) = pair[0].coords();
            let (a1, b1, _, _) = pair[1].coords();
            assert_eq!(c0, a1);
            assert_eq!(d0, b1);
        }
    }

    #[test]
    fn centroids() {
        let tri = TrapezoidalSet::new("t", 0.0, 0.25, 0.25, 0.5).unwrap();
        assert_abs_diff_eq!(tri.centroid(), 0.25, epsilon = 1e-12);
        let rect = TrapezoidalSet::new("r", 0.0, 0.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(rect.centroid(), 0.5, epsilon = 1e-12);
        let point = TrapezoidalSet::new("p", 0.3, 0.3, 0.3, 0.3).unwrap();
        assert_eq!(point.centroid(), 0.3);
        // interior sets of a uniform partition are symmetric
        let p = FuzzyPartition::uniform(5).unwrap();
        for s in &p.sets()[1..4] {
            assert_abs_diff_eq!(s.centroid(), s.core_midpoint(), epsilon = 1e-12);
        }
        // shoulder centroids stay inside their cores
        for s in p.sets() {
            let (_, b, c, _) = s.coords();
            assert!(b <= s.centroid() && s.centroid() <= c);
        }
    }

    #[test]
    fn text_dump_round_trip() {
        let p = FuzzyPartition::uniform(4).unwrap();
        let text = p.to_text();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("fs1,0.000000000,0.000000000,0.181818182,0.272727273\n"));
        let back = FuzzyPartition::from_text(&text).unwrap();
        assert_eq!(back.len(), 4);
        for (x, y) in back.sets().iter().zip(p.sets()) {
            assert_eq!(x.label(), y.label());
            assert_abs_diff_eq!(x.centroid(), y.centroid(), epsilon = 1e-8);
        }
        assert!(matches!(
            FuzzyPartition::from_text("fs1,0,0,1"),
            Err(FuzzyError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn explicit_partition_validation() {
        let gap = vec![
            TrapezoidalSet::new("l", 0.0, 0.0, 0.3, 0.4).unwrap(),
            TrapezoidalSet::new("r", 0.5, 0.6, 1.0, 1.0).unwrap(),
        ];
        assert!(matches!(FuzzyPartition::new(gap), Err(FuzzyError::NotRuspini { .. })));
        let no_shoulder = vec![TrapezoidalSet::new("m", 0.0, 0.1, 1.0, 1.0).unwrap()];
        assert!(FuzzyPartition::new(no_shoulder).is_err());
        assert_eq!(FuzzyPartition::new(vec![]), Err(FuzzyError::EmptyPartition));
    }

    proptest! {
        #[test]
        fn ruspini_holds_for_any_uniform_partition(n in 1usize..=20, x in -0.5f64..1.5) {
            let p = FuzzyPartition::uniform(n).unwrap();
            let sum: f64 = p.fuzzify(x).iter().sum();
            prop_assert!((sum - 1.0).abs() <= RUSPINI_TOLERANCE);
        }

        #[test]
        fn core_midpoints_strictly_increase(n in 1usize..=20) {
            let p = FuzzyPartition::uniform(n).unwrap();
            prop_assert_eq!(p.len(), n);
            let mids: Vec<f64> = p.sets().iter().map(TrapezoidalSet::core_midpoint).collect();
            prop_assert!(mids.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn edges_are_monotone(n in 1usize..=16, i in 0usize..16, t0 in 0.0f64..1.0, t1 in 0.0f64..1.0) {
            let p = FuzzyPartition::uniform(n).unwrap();
            let s = &p.sets()[i % n];
            let (a, b, c, d) = s.coords();
            let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
            prop_assert!(s.membership(a + lo * (b - a)) <= s.membership(a + hi * (b - a)));
            prop_assert!(s.membership(c + lo * (d - c)) >= s.membership(c + hi * (d - c)));
        }

        #[test]
        fn tnorm_axioms(x in 0.0f64..=1.0, y in 0.0f64..=1.0, z in 0.0f64..=1.0, bump in 0.0f64..=1.0) {
            for kind in [TNormKind::Product, TNormKind::Minimum] {
                let t = |a, b| kind.apply(a, b).unwrap();
                prop_assert_eq!(t(x, y), t(y, x));
                prop_assert!((t(t(x, y), z) - t(x, t(y, z))).abs() <= 1e-15);
                let y2 = y + bump * (1.0 - y);
                prop_assert!(t(x, y) <= t(x, y2));
                prop_assert_eq!(t(x, 1.0), x);
            }
        }
    }
}
