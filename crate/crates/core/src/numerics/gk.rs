//! Adaptive Gauss–Kronrod (G10/K21) quadrature over vector-valued integrands.
//!
//! The driver keeps a priority queue of panels keyed by error estimate and
//! bisects the worst one until the summed estimate meets the tolerance. Final
//! panels are summed left to right with Neumaier compensation, so the result
//! does not depend on the order in which panels were refined.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_626_368_805,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// A vector-valued integrand: writes `f(x)` into the output slice.
pub type VecIntegrand<'a> = dyn FnMut(f64, &mut [f64]) + 'a;

#[derive(Clone, Debug)]
pub(crate) struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub value: Vec<f64>,
    pub err: f64,
}

/// One K21 evaluation with its G10 companion and the QUADPACK error heuristic.
pub(crate) fn gk21(f: &mut VecIntegrand<'_>, lo: f64, hi: f64, dim: usize) -> Panel {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let ahalf = half.abs();

    // fv[node][component]; node 0..10 at centre - half*XGK, 10 is the centre,
    // 11..21 mirror at centre + half*XGK.
    let mut fv = vec![0.0; 21 * dim];
    for j in 0..10 {
        let dx = half * XGK[j];
        f(centre - dx, &mut fv[j * dim..(j + 1) * dim]);
        f(centre + dx, &mut fv[(20 - j) * dim..(21 - j) * dim]);
    }
    f(centre, &mut fv[10 * dim..11 * dim]);

    let mut value = vec![0.0; dim];
    let mut worst = 0.0_f64;
    for c in 0..dim {
        let fc = fv[10 * dim + c];
        let mut resk = WGK[10] * fc;
        let mut resg = 0.0;
        let mut resabs = resk.abs();
        for j in 0..10 {
            let f1 = fv[j * dim + c];
            let f2 = fv[(20 - j) * dim + c];
            resk += WGK[j] * (f1 + f2);
            resabs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                resg += WG[j / 2] * (f1 + f2);
            }
        }
        let reskh = 0.5 * resk;
        let mut resasc = WGK[10] * (fc - reskh).abs();
        for j in 0..10 {
            let f1 = fv[j * dim + c];
            let f2 = fv[(20 - j) * dim + c];
            resasc += WGK[j] * ((f1 - reskh).abs() + (f2 - reskh).abs());
        }
        let result = resk * half;
        resabs *= ahalf;
        resasc *= ahalf;
        let mut err = ((resk - resg) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        if !result.is_finite() || !err.is_finite() {
            err = f64::INFINITY;
        }
        value[c] = result;
        worst = worst.max(err);
    }
    Panel { lo, hi, value, err: worst }
}

#[derive(PartialEq)]
struct Keyed {
    err: f64,
    idx: usize,
}

impl Eq for Keyed {}

impl Ord for Keyed {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Keyed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Tolerances for one adaptive run.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

/// Result of an adaptive run.
#[derive(Clone, Debug)]
pub(crate) struct Estimate {
    pub value: Vec<f64>,
}

/// Adaptive integration of `f` over `[lo, hi]`, pre-split at `breaks`.
pub(crate) fn adaptive(
    f: &mut VecIntegrand<'_>,
    dim: usize,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    if !(lo < hi) {
        return Ok(Estimate { value: vec![0.0; dim] });
    }
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(hi);

    let mut panels: Vec<Panel> = edges.windows(2).map(|w| gk21(f, w[0], w[1], dim)).collect();
    for p in &panels {
        check_finite(p)?;
    }
    let mut heap: BinaryHeap<Keyed> = panels.iter().enumerate().map(|(idx, p)| Keyed { err: p.err, idx }).collect();
    let mut running = vec![0.0; dim];
    for p in &panels {
        for (r, v) in running.iter_mut().zip(&p.value) {
            *r += v;
        }
    }
    let max_panels = tol.max_panels.max(panels.len());

    loop {
        let total_err = neumaier(panels.iter().map(|p| p.err));
        let scale = running.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let target = tol.abs.max(tol.rel * scale);
        if total_err <= target {
            break;
        }
        let worst = loop {
            match heap.pop() {
                Some(k) => {
                    let p = &panels[k.idx];
                    let width = p.hi - p.lo;
                    let floor = 8.0 * f64::EPSILON * p.lo.abs().max(p.hi.abs()).max(f64::MIN_POSITIVE);
                    if width > floor {
                        break Some(k.idx);
                    }
                }
                None => break None,
            }
        };
        let Some(idx) = worst else {
            return Err(Error::NonConvergent { lo, hi, max_subdiv: max_panels, estimate: total_err });
        };
        if panels.len() >= max_panels {
            return Err(Error::NonConvergent { lo, hi, max_subdiv: max_panels, estimate: total_err });
        }
        let old = panels[idx].clone();
        let mid = 0.5 * (old.lo + old.hi);
        let left = gk21(f, old.lo, mid, dim);
        let right = gk21(f, mid, old.hi, dim);
        check_finite(&left)?;
        check_finite(&right)?;
        for (c, r) in running.iter_mut().enumerate() {
            *r += left.value[c] + right.value[c] - old.value[c];
        }
        let right_idx = panels.len();
        heap.push(Keyed { err: left.err, idx });
        heap.push(Keyed { err: right.err, idx: right_idx });
        panels[idx] = left;
        panels.push(right);
    }

    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut value = vec![0.0; dim];
    for (c, slot) in value.iter_mut().enumerate() {
        *slot = neumaier(panels.iter().map(|p| p.value[c]));
    }
    Ok(Estimate { value })
}

fn check_finite(p: &Panel) -> Result<()> {
    if p.value.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::DivergentIntegral { radius: 0.5 * (p.lo + p.hi), increment: f64::INFINITY })
    }
}

/// Compensated sum in iteration order.
pub(crate) fn neumaier<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
