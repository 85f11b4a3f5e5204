use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Hypergeometric};

/// 2x2 table of joint outcomes `[[both, a_only], [b_only, neither]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table2 {
    pub n11: u64,
    pub n10: u64,
    pub n01: u64,
    pub n00: u64,
}

impl Table2 {
    pub fn from_pairs(a: &[bool], b: &[bool]) -> Table2 {
        let mut t = Table2 { n11: 0, n10: 0, n01: 0, n00: 0 };
        for (&x, &y) in a.iter().zip(b) {
            match (x, y) {
                (true, true) => t.n11 += 1,
                (true, false) => t.n10 += 1,
                (false, true) => t.n01 += 1,
                (false, false) => t.n00 += 1,
            }
        }
        t
    }

    pub fn total(&self) -> u64 {
        self.n11 + self.n10 + self.n01 + self.n00
    }

    fn margins(&self) -> (u64, u64, u64) {
        (self.n11 + self.n10, self.n11 + self.n01, self.total())
    }

    fn min_expected(&self) -> f64 {
        let (r1, c1, n) = self.margins();
        let (r0, c0) = (n - r1, n - c1);
        let n = n as f64;
        [r1 * c1, r1 * c0, r0 * c1, r0 * c0].iter().map(|&x| x as f64 / n).fold(f64::INFINITY, f64::min)
    }

    /// Pearson correlation of the two indicators; 0 when either is constant.
    pub fn correlation(&self) -> f64 {
        let (r1, c1, n) = self.margins();
        let n = n as f64;
        let (pa, pb) = (r1 as f64 / n, c1 as f64 / n);
        let den = (pa * (1.0 - pa) * pb * (1.0 - pb)).sqrt();
        if den == 0.0 {
            0.0
        } else {
            (self.n11 as f64 / n - pa * pb) / den
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestKind {
    ChiSquare,
    FisherExact,
    /// A margin is constant: independence holds trivially.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceTest {
    pub kind: TestKind,
    pub statistic: f64,
    pub p_value: f64,
}

/// Pearson chi-square (1 dof) when all expected counts are at least 5,
/// otherwise the two-sided Fisher exact test.
pub fn independence_test(t: &Table2) -> IndependenceTest {
    let (r1, c1, n) = t.margins();
    if r1 == 0 || c1 == 0 || r1 == n || c1 == n {
        return IndependenceTest { kind: TestKind::Degenerate, statistic: 0.0, p_value: 1.0 };
    }
    if t.min_expected() >= 5.0 {
        let nf = n as f64;
        let obs = [t.n11, t.n10, t.n01, t.n00];
        let (r0, c0) = (n - r1, n - c1);
        let exp = [r1 * c1, r1 * c0, r0 * c1, r0 * c0].map(|x| x as f64 / nf);
        let stat: f64 = obs.iter().zip(&exp).map(|(&o, e)| (o as f64 - e).powi(2) / e).sum();
        let chi = ChiSquared::new(1.0).expect("valid dof");
        return IndependenceTest { kind: TestKind::ChiSquare, statistic: stat, p_value: chi.sf(stat) };
    }
    let h = Hypergeometric::new(n, c1, r1).expect("valid margins");
    let p_obs = h.pmf(t.n11);
    let lo = r1.saturating_sub(n - c1);
    let hi = r1.min(c1);
    let p: f64 = (lo..=hi).map(|k| h.pmf(k)).filter(|&q| q <= p_obs * (1.0 + 1e-7)).sum();
    IndependenceTest { kind: TestKind::FisherExact, statistic: t.n11 as f64, p_value: p.min(1.0) }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyResult {
    pub tests: usize,
    pub rejections: usize,
    pub level: f64,
    /// `P(Bin(tests, level) >= rejections)`.
    pub family_p_value: f64,
    pub passes: bool,
}

/// Counts per-pair rejections at `level`; the family passes unless that count
/// is itself significant at `level` under `Bin(tests, level)`.
pub fn family_independence(p_values: &[f64], level: f64) -> FamilyResult {
    let m = p_values.len();
    let rej = p_values.iter().filter(|&&p| p < level).count();
    let fp = if rej == 0 || m == 0 {
        1.0
    } else {
        let b = Binomial::new(level, m as u64).expect("valid binomial");
        1.0 - b.cdf(rej as u64 - 1)
    };
    FamilyResult { tests: m, rejections: rej, level, family_p_value: fp, passes: fp >= level }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_matches_hand_value() {
        // expected counts all 25; statistic = 4 * 25 / 25 = 4 at deviation 5
        let t = Table2 { n11: 30, n10: 20, n01: 20, n00: 30 };
        let r = independence_test(&t);
        assert_eq!(r.kind, TestKind::ChiSquare);
        assert!((r.statistic - 4.0).abs() < 1e-12);
        assert!((r.p_value - 0.0455003).abs() < 1e-6);
    }

    #[test]
    fn fisher_on_small_table() {
        // the classic tea-tasting table: two-sided p = 0.4857
        let t = Table2 { n11: 3, n10: 1, n01: 1, n00: 3 };
        let r = independence_test(&t);
        assert_eq!(r.kind, TestKind::FisherExact);
        assert!((r.p_value - 0.485714).abs() < 1e-5);
    }

    #[test]
    fn constant_margin_is_degenerate() {
        let t = Table2::from_pairs(&[true; 10], &[true, false, true, false, true, false, true, false, true, false]);
        assert_eq!(independence_test(&t).kind, TestKind::Degenerate);
        assert_eq!(t.correlation(), 0.0);
    }

    #[test]
    fn family_rule() {
        let ok = family_independence(&[0.5; 30], 0.01);
        assert!(ok.passes);
        let one = family_independence(&[[0.005].as_slice(), &[0.5; 29]].concat(), 0.01);
        assert_eq!(one.rejections, 1);
        assert!(one.passes);
        let many = family_independence(&[0.001; 5].iter().chain(&[0.5; 25]).copied().collect::<Vec<_>>(), 0.01);
        assert!(!many.passes);
    }
}
