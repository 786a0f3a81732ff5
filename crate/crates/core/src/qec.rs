//! Fabrication-defect model for surface-code logical qubits.
//!
//! A logical qubit is a distance-`d` patch of `2d² - 1` physical qubits.
//! Each physical qubit independently comes out of fabrication broken with
//! probability `p`; the patch is defective when the number of broken qubits
//! exceeds the correctable budget `(d - 1) / 2`. The yield decision is
//! purely count-based; [`SurfaceCodeLayout`] exists for reporting which
//! stabilizers a given defect pattern knocks out, and plays no part in it.

use std::collections::BTreeSet;
use std::fmt;

use rand::distributions::{Bernoulli, Distribution};
use rand::Rng;

/// Largest supported code distance; keeps the patch size (and the tail
/// summation) comfortably inside u32 arithmetic.
pub const MAX_DISTANCE: u32 = 999;

/// Parameter validation errors for the defect model.
#[derive(Debug, Clone, PartialEq)]
pub enum QecError {
    /// Code distance must be an odd integer in 3..=MAX_DISTANCE.
    InvalidDistance(u32),
    /// Fabrication error rate must lie in [0, 1].
    InvalidErrorRate(f64),
    /// Defect mask length must equal the patch size.
    MaskLength { expected: usize, got: usize },
}

impl fmt::Display for QecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QecError::InvalidDistance(d) => {
                write!(f, "code distance must be odd and in 3..={MAX_DISTANCE}, got {d}")
            }
            QecError::InvalidErrorRate(p) => {
                write!(f, "fabrication error rate must be in [0, 1], got {p}")
            }
            QecError::MaskLength { expected, got } => {
                write!(
                    f,
                    "defect mask has {got} entries, patch has {expected} sites"
                )
            }
        }
    }
}

impl std::error::Error for QecError {}

/// Surface-code parameters of one logical qubit patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QecParams {
    distance: u32,
}

impl QecParams {
    pub fn new(distance: u32) -> Result<Self, QecError> {
        if !(3..=MAX_DISTANCE).contains(&distance) || distance.is_multiple_of(2) {
            return Err(QecError::InvalidDistance(distance));
        }
        Ok(Self { distance })
    }

    pub fn distance(&self) -> u32 {
        self.distance
    }

    /// Physical qubits per patch: `2d² - 1` (d² data + d² - 1 ancilla).
    pub fn physical_per_logical(&self) -> u32 {
        2 * self.distance * self.distance - 1
    }

    /// Number of broken physical qubits the patch tolerates: `(d - 1) / 2`.
    pub fn correctable(&self) -> u32 {
        (self.distance - 1) / 2
    }
}

/// Physical qubits needed for one logical qubit at code distance `d`.
pub fn physical_per_logical(distance: u32) -> Result<u32, QecError> {
    QecParams::new(distance).map(|p| p.physical_per_logical())
}

/// Per-physical-qubit fabrication defect probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FabricationModel {
    error_rate: f64,
}

impl FabricationModel {
    pub fn new(error_rate: f64) -> Result<Self, QecError> {
        if !(0.0..=1.0).contains(&error_rate) {
            return Err(QecError::InvalidErrorRate(error_rate));
        }
        Ok(Self { error_rate })
    }

    pub fn error_rate(&self) -> f64 {
        self.error_rate
    }
}

/// Sampled defect state of one patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchDefectSample {
    pub defect_count: u32,
    pub defective: bool,
}

/// Draws the fabrication outcome of one patch: `2d² - 1` independent
/// Bernoulli trials, defective iff the count exceeds the correctable budget.
///
/// The trials are drawn qubit by qubit (not via an inverse-CDF shortcut) so
/// that per-qubit defect positions are well defined and reproducible; see
/// [`sample_defect_mask`] for the positional form.
pub fn sample_patch<R: Rng + ?Sized>(
    params: QecParams,
    model: FabricationModel,
    rng: &mut R,
) -> PatchDefectSample {
    let trial = Bernoulli::new(model.error_rate()).expect("rate validated on construction");
    let mut defect_count = 0u32;
    for _ in 0..params.physical_per_logical() {
        if trial.sample(rng) {
            defect_count += 1;
        }
    }
    PatchDefectSample {
        defect_count,
        defective: defect_count > params.correctable(),
    }
}

/// Per-site defect flags for one patch, in site-id order (data then ancilla).
/// Consumes exactly as many draws as [`sample_patch`].
pub fn sample_defect_mask<R: Rng + ?Sized>(
    params: QecParams,
    model: FabricationModel,
    rng: &mut R,
) -> Vec<bool> {
    let trial = Bernoulli::new(model.error_rate()).expect("rate validated on construction");
    (0..params.physical_per_logical())
        .map(|_| trial.sample(rng))
        .collect()
}

/// Exact probability that a patch is defective:
/// `q = Σ_{k=t+1}^{n} C(n,k) p^k (1-p)^(n-k)` with `n = 2d² - 1`,
/// `t = (d-1)/2`.
///
/// This is the analytic counterpart of [`sample_patch`]; the two must agree
/// to Monte-Carlo accuracy and are tested against each other. Terms are
/// accumulated with log-space binomial coefficients so large patches
/// (n > 100) stay in range.
pub fn logical_defect_prob(params: QecParams, model: FabricationModel) -> f64 {
    let n = params.physical_per_logical() as u64;
    let t = params.correctable() as u64;
    binomial_upper_tail(n, t, model.error_rate())
}

/// P(X > t) for X ~ Binomial(n, p).
fn binomial_upper_tail(n: u64, t: u64, p: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return if t < n { 1.0 } else { 0.0 };
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    // ln C(n, k), advanced incrementally in k.
    let mut ln_choose = 0.0;
    let mut sum = 0.0;
    for k in 0..=n {
        if k > t {
            let ln_term = ln_choose + k as f64 * ln_p + (n - k) as f64 * ln_q;
            sum += ln_term.exp();
        }
        if k < n {
            ln_choose += ((n - k) as f64).ln() - ((k + 1) as f64).ln();
        }
    }
    sum.min(1.0)
}

/// One disabled component of a patch, for defect reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Component {
    /// A physical site (data or ancilla), by global site id.
    Site(usize),
    /// A stabilizer, indexed like the ancilla site that measures it.
    Stabilizer(usize),
}

/// Geometric view of one patch: a rotated lattice with `d²` data sites
/// (ids `0..d²`, row-major) and `d² - 1` ancilla sites (ids `d²..2d² - 1`),
/// one ancilla per stabilizer. Reporting only — never consulted by the
/// yield decision.
#[derive(Debug, Clone)]
pub struct SurfaceCodeLayout {
    distance: u32,
    defect_mask: Vec<bool>,
    /// Data-site ids in each stabilizer's support; stabilizer `i` is
    /// measured by ancilla site `d² + i`.
    stabilizer_data: Vec<Vec<usize>>,
}

impl SurfaceCodeLayout {
    pub fn new(params: QecParams, defect_mask: Vec<bool>) -> Result<Self, QecError> {
        let expected = params.physical_per_logical() as usize;
        if defect_mask.len() != expected {
            return Err(QecError::MaskLength {
                expected,
                got: defect_mask.len(),
            });
        }
        Ok(Self {
            distance: params.distance(),
            defect_mask,
            stabilizer_data: build_stabilizers(params.distance() as usize),
        })
    }

    /// Samples a defect mask and wraps it in a layout.
    pub fn sample<R: Rng + ?Sized>(
        params: QecParams,
        model: FabricationModel,
        rng: &mut R,
    ) -> Self {
        let mask = sample_defect_mask(params, model, rng);
        Self::new(params, mask).expect("mask length matches by construction")
    }

    pub fn distance(&self) -> u32 {
        self.distance
    }

    pub fn num_data_sites(&self) -> usize {
        (self.distance * self.distance) as usize
    }

    pub fn num_stabilizers(&self) -> usize {
        self.num_data_sites() - 1
    }

    pub fn defect_mask(&self) -> &[bool] {
        &self.defect_mask
    }

    /// Data-site ids in stabilizer `stab`'s support (2 on the boundary,
    /// 4 in the bulk).
    pub fn stabilizer_support(&self, stab: usize) -> &[usize] {
        &self.stabilizer_data[stab]
    }

    /// Global site id of the ancilla measuring stabilizer `stab`.
    pub fn ancilla_site(&self, stab: usize) -> usize {
        self.num_data_sites() + stab
    }
}

/// Every defective site, plus every stabilizer touching one (through its
/// data support or its own ancilla). Pure function of the mask.
pub fn disabled_components(layout: &SurfaceCodeLayout) -> BTreeSet<Component> {
    let mut out = BTreeSet::new();
    for (site, &broken) in layout.defect_mask().iter().enumerate() {
        if broken {
            out.insert(Component::Site(site));
        }
    }
    for stab in 0..layout.num_stabilizers() {
        let hit = layout.defect_mask()[layout.ancilla_site(stab)]
            || layout
                .stabilizer_support(stab)
                .iter()
                .any(|&site| layout.defect_mask()[site]);
        if hit {
            out.insert(Component::Stabilizer(stab));
        }
    }
    out
}

/// Rotated-lattice plaquette enumeration: data qubits on a `d × d` grid,
/// `(d-1)²` bulk plaquettes touching four data qubits each, and `2(d-1)`
/// boundary plaquettes touching two, alternating along each edge.
fn build_stabilizers(d: usize) -> Vec<Vec<usize>> {
    let site = |r: usize, c: usize| r * d + c;
    let mut stabs = Vec::with_capacity(d * d - 1);
    // Bulk plaquettes anchored at their upper-left data qubit.
    for r in 0..d - 1 {
        for c in 0..d - 1 {
            stabs.push(vec![
                site(r, c),
                site(r, c + 1),
                site(r + 1, c),
                site(r + 1, c + 1),
            ]);
        }
    }
    // Boundary half-plaquettes, every other slot along each edge.
    for c in 0..d - 1 {
        if c % 2 == 1 {
            stabs.push(vec![site(0, c), site(0, c + 1)]); // top
        } else {
            stabs.push(vec![site(d - 1, c), site(d - 1, c + 1)]); // bottom
        }
    }
    for r in 0..d - 1 {
        if r % 2 == 0 {
            stabs.push(vec![site(r, 0), site(r + 1, 0)]); // left
        } else {
            stabs.push(vec![site(r, d - 1), site(r + 1, d - 1)]); // right
        }
    }
    debug_assert_eq!(stabs.len(), d * d - 1);
    stabs
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(d: u32) -> QecParams {
        QecParams::new(d).unwrap()
    }

    fn model(p: f64) -> FabricationModel {
        FabricationModel::new(p).unwrap()
    }

    /// Independent oracle: plain product-form tail sum over a Pascal row,
    /// no logs, usable up to n = 161 in f64.
    fn tail_by_direct_sum(n: u64, t: u64, p: f64) -> f64 {
        let mut choose = 1.0f64;
        let mut sum = 0.0;
        for k in 0..=n {
            if k > t {
                sum += choose * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
            }
            if k < n {
                choose = choose * (n - k) as f64 / (k + 1) as f64;
            }
        }
        sum
    }

    #[test]
    fn patch_sizes() {
        assert_eq!(physical_per_logical(3).unwrap(), 17);
        assert_eq!(physical_per_logical(5).unwrap(), 49);
        assert_eq!(physical_per_logical(9).unwrap(), 161);
    }

    #[test]
    fn patch_size_is_data_plus_ancilla() {
        for d in [3u32, 5, 7, 9, 11, 25] {
            let n = physical_per_logical(d).unwrap();
            assert_eq!(n, d * d + (d * d - 1));
        }
    }

    #[test]
    fn invalid_distances_rejected() {
        assert_eq!(physical_per_logical(2), Err(QecError::InvalidDistance(2)));
        assert_eq!(physical_per_logical(4), Err(QecError::InvalidDistance(4)));
        assert_eq!(physical_per_logical(1), Err(QecError::InvalidDistance(1)));
        assert_eq!(physical_per_logical(0), Err(QecError::InvalidDistance(0)));
        assert_eq!(
            physical_per_logical(1001),
            Err(QecError::InvalidDistance(1001))
        );
        assert_eq!(physical_per_logical(MAX_DISTANCE).unwrap(), 1_996_001);
    }

    #[test]
    fn invalid_rates_rejected() {
        assert!(FabricationModel::new(-0.1).is_err());
        assert!(FabricationModel::new(1.1).is_err());
        assert!(FabricationModel::new(f64::NAN).is_err());
        assert!(FabricationModel::new(0.0).is_ok());
        assert!(FabricationModel::new(1.0).is_ok());
    }

    #[test]
    fn correctable_budget() {
        assert_eq!(params(3).correctable(), 1);
        assert_eq!(params(5).correctable(), 2);
        assert_eq!(params(9).correctable(), 4);
    }

    #[test]
    fn sample_patch_zero_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = sample_patch(params(3), model(0.0), &mut rng);
        assert_eq!(s.defect_count, 0);
        assert!(!s.defective);
    }

    #[test]
    fn sample_patch_certain_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = sample_patch(params(3), model(1.0), &mut rng);
        assert_eq!(s.defect_count, 17);
        assert!(s.defective);
    }

    #[test]
    fn defect_prob_matches_direct_sum() {
        // Frozen from the tail formula evaluated independently (direct
        // product-form summation of the 16-term tail): 0.0032343861.
        let q = logical_defect_prob(params(3), model(0.005));
        assert!((q - 0.0032343861).abs() < 1e-9, "q = {q}");
        let q = logical_defect_prob(params(3), model(0.01));
        assert!((q - 0.0123089855).abs() < 1e-9, "q = {q}");
        // Cross-check log-space against the no-log oracle on a grid.
        for d in [3u32, 5, 7, 9] {
            for p in [0.001, 0.005, 0.01, 0.1, 0.5, 0.9] {
                let pr = params(d);
                let got = logical_defect_prob(pr, model(p));
                let want = tail_by_direct_sum(
                    pr.physical_per_logical() as u64,
                    pr.correctable() as u64,
                    p,
                );
                assert!(
                    (got - want).abs() < 1e-12 * want.max(1e-30) + 1e-14,
                    "d={d} p={p}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn defect_prob_edge_rates() {
        for d in [3u32, 5, 9] {
            assert_eq!(logical_defect_prob(params(d), model(0.0)), 0.0);
            assert_eq!(logical_defect_prob(params(d), model(1.0)), 1.0);
        }
    }

    #[test]
    fn defect_prob_monotone_in_rate() {
        for d in [3u32, 5, 7, 9] {
            let mut prev = 0.0;
            for i in 0..=100 {
                let p = i as f64 / 100.0;
                let q = logical_defect_prob(params(d), model(p));
                assert!((0.0..=1.0).contains(&q));
                assert!(q >= prev - 1e-12, "d={d} p={p}: {q} < {prev}");
                prev = q;
            }
        }
    }

    #[test]
    fn empirical_rate_matches_analytic() {
        // >= 1e5 samples per point; require agreement within 4 standard errors.
        let samples = 100_000u32;
        for d in [3u32, 5, 7, 9] {
            for p in [0.005, 0.01] {
                let pr = params(d);
                let fm = model(p);
                let q = logical_defect_prob(pr, fm);
                let mut rng = ChaCha8Rng::seed_from_u64(7 + d as u64);
                let defective = (0..samples)
                    .filter(|_| sample_patch(pr, fm, &mut rng).defective)
                    .count() as f64;
                let rate = defective / samples as f64;
                let se = (q * (1.0 - q) / samples as f64).sqrt();
                assert!(
                    (rate - q).abs() <= 4.0 * se,
                    "d={d} p={p}: empirical {rate} vs analytic {q} (se {se})"
                );
            }
        }
    }

    #[test]
    fn mean_defective_rate_d3() {
        // 1e6 samples at (d=3, p=0.005); analytic rate 0.0032344.
        let pr = params(3);
        let fm = model(0.005);
        let samples = 1_000_000u32;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let defective = (0..samples)
            .filter(|_| sample_patch(pr, fm, &mut rng).defective)
            .count() as f64;
        let rate = defective / samples as f64;
        assert!((rate - 0.00324).abs() < 2e-4, "rate = {rate}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let pr = params(5);
        let fm = model(0.3);
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            (0..64)
                .map(|_| sample_patch(pr, fm, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn layout_counts() {
        for d in [3u32, 5, 7] {
            let pr = params(d);
            let layout =
                SurfaceCodeLayout::new(pr, vec![false; pr.physical_per_logical() as usize])
                    .unwrap();
            assert_eq!(
                layout.num_data_sites() + layout.num_stabilizers(),
                pr.physical_per_logical() as usize
            );
            assert_eq!(layout.num_stabilizers(), (d * d - 1) as usize);
            // Every stabilizer touches 2 or 4 data sites, all in range.
            for s in 0..layout.num_stabilizers() {
                let sup = layout.stabilizer_support(s);
                assert!(sup.len() == 2 || sup.len() == 4);
                assert!(sup.iter().all(|&q| q < layout.num_data_sites()));
            }
            // Every data site is covered by at least one stabilizer.
            for q in 0..layout.num_data_sites() {
                assert!((0..layout.num_stabilizers())
                    .any(|s| layout.stabilizer_support(s).contains(&q)));
            }
        }
    }

    #[test]
    fn mask_length_checked() {
        let err = SurfaceCodeLayout::new(params(3), vec![false; 5]).unwrap_err();
        assert_eq!(
            err,
            QecError::MaskLength {
                expected: 17,
                got: 5
            }
        );
    }

    #[test]
    fn disabled_components_empty_mask() {
        let layout = SurfaceCodeLayout::new(params(3), vec![false; 17]).unwrap();
        assert!(disabled_components(&layout).is_empty());
    }

    #[test]
    fn disabled_components_full_mask() {
        let layout = SurfaceCodeLayout::new(params(3), vec![true; 17]).unwrap();
        let disabled = disabled_components(&layout);
        for site in 0..17 {
            assert!(disabled.contains(&Component::Site(site)));
        }
        for stab in 0..8 {
            assert!(disabled.contains(&Component::Stabilizer(stab)));
        }
    }

    #[test]
    fn disabled_components_single_bulk_site() {
        // Mask only the central data site of d = 3 and brute-force the
        // expected stabilizer set from the published supports.
        let pr = params(3);
        let center = 4usize; // (1, 1) on the 3x3 data grid
        let mut mask = vec![false; 17];
        mask[center] = true;
        let layout = SurfaceCodeLayout::new(pr, mask).unwrap();

        let expected: BTreeSet<Component> = (0..layout.num_stabilizers())
            .filter(|&s| layout.stabilizer_support(s).contains(&center))
            .map(Component::Stabilizer)
            .chain(std::iter::once(Component::Site(center)))
            .collect();
        let got = disabled_components(&layout);
        assert_eq!(got, expected);

        let stab_count = got
            .iter()
            .filter(|c| matches!(c, Component::Stabilizer(_)))
            .count();
        assert!(stab_count >= 1 && stab_count <= 4);
    }

    #[test]
    fn disabled_components_masked_ancilla() {
        // A broken ancilla disables exactly its own stabilizer.
        let pr = params(3);
        let mut mask = vec![false; 17];
        let layout0 = SurfaceCodeLayout::new(pr, mask.clone()).unwrap();
        let anc = layout0.ancilla_site(3);
        mask[anc] = true;
        let layout = SurfaceCodeLayout::new(pr, mask).unwrap();
        let got = disabled_components(&layout);
        let expected: BTreeSet<Component> = [Component::Site(anc), Component::Stabilizer(3)]
            .into_iter()
            .collect();
        assert_eq!(got, expected);
    }
}
