//! Brute-force resolution of the diverge by matching layers.
//!
//! Every flux triple on a lattice over `[0, sigma]` with `C^1 = C^2 + C^3` is
//! tried against all eight stability patterns. A candidate is admissible when
//! each road's layer exists at its flux, its LWR end state lies in the
//! half-Riemann set of the far field, and the traces satisfy one of the four
//! kinetic coupling relations. Admissible clusters are then refined on finer
//! lattices until their flux spread drops below `flux_tol`.

use std::collections::HashMap;

use serde::Serialize;

use crate::diagram::FluxFunction;
use crate::error::{check_density, Error, Result};
use crate::junction::{LayerPattern, NoPrefCase, NodeResolution, ResolutionLabel, Stability, Trace};
use crate::layer::classify;
use crate::lwr::{half_riemann_set, HalfRiemannSet, Side};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    /// Base lattice has `grid_n` steps across `[0, sigma]`.
    pub grid_n: u64,
    /// Lattice refinement factor per level.
    pub refine: u64,
    /// Target flux spread of a resolved cluster.
    pub flux_tol: f64,
    pub max_levels: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            grid_n: 400,
            refine: 8,
            flux_tol: 1e-4,
            max_levels: 6,
        }
    }
}

impl OracleConfig {
    pub fn with_grid(grid_n: u64) -> Self {
        Self {
            grid_n,
            ..Self::default()
        }
    }

    /// Base density tolerance `2 / grid_n`.
    pub fn density_tol(&self) -> f64 {
        2.0 / self.grid_n as f64
    }

    /// Fluxes further apart than this are distinct solutions.
    pub fn distinct_tol(&self) -> f64 {
        5.0 / self.grid_n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResolution {
    pub resolution: NodeResolution,
    /// Flux triples of other surviving clusters that differ from the first.
    pub alternatives: Vec<[f64; 3]>,
    /// Admissible lattice points at the base level.
    pub base_candidates: usize,
}

impl OracleResolution {
    pub fn is_ambiguous(&self) -> bool {
        !self.alternatives.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
struct RoadOption {
    rho_k: f64,
    lo: f64,
    hi: f64,
    tol: f64,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    idx: (u64, u64),
    c: [f64; 3],
    pattern: LayerPattern,
    case: NoPrefCase,
    traces: [f64; 3],
    unique: [bool; 3],
    rho_k: [f64; 3],
}

struct Context<'a> {
    f: &'a FluxFunction,
    sets: [HalfRiemannSet; 3],
    cfg: OracleConfig,
}

#[derive(Debug, Clone, Copy)]
struct Lattice {
    n: u64,
    sigma: f64,
}

impl Lattice {
    fn flux(&self, i: u64) -> f64 {
        if i >= self.n {
            self.sigma
        } else {
            self.sigma * (i as f64 / self.n as f64)
        }
    }

    fn step(&self) -> f64 {
        self.sigma / self.n as f64
    }
}

const SIDES: [Side; 3] = [Side::Right, Side::Left, Side::Left];

impl Context<'_> {
    /// Largest density change of either root over one lattice step around `c`.
    fn modulus(&self, c: f64, h: f64) -> f64 {
        let f = self.f;
        let lo = (c - h).max(0.0);
        let hi = (c + h).min(f.sigma());
        let d1 = (f.rho_minus(hi) - f.rho_minus(lo)).abs();
        let d2 = (f.rho_plus(hi) - f.rho_plus(lo)).abs();
        0.5 * d1.max(d2)
    }

    fn options(&self, road: usize, lat: Lattice, lo: u64, hi: u64, tol: f64) -> Vec<[Option<RoadOption>; 2]> {
        (lo..=hi)
            .map(|i| {
                let c = lat.flux(i);
                let tol = tol.max(2.0 * self.modulus(c, lat.step()));
                let cls = classify(c, SIDES[road], self.f).expect("lattice flux within capacity");
                [Stability::Stable, Stability::Unstable].map(|tag| {
                    let row = cls.row(tag)?;
                    if !self.sets[road].contains_tol(row.rho_k, 0.5 * tol) {
                        return None;
                    }
                    // q <= rho on every road
                    let lo = row.rho0.lo.max(c);
                    let hi = row.rho0.hi;
                    (lo <= hi + tol).then_some(RoadOption {
                        rho_k: row.rho_k,
                        lo,
                        hi,
                        tol,
                    })
                })
            })
            .collect()
    }

    fn scan(&self, lat: Lattice, r2: (u64, u64), r3: (u64, u64), tol: f64) -> Vec<Candidate> {
        let r1 = (r2.0 + r3.0, (r2.1 + r3.1).min(lat.n));
        if r1.0 > r1.1 {
            return Vec::new();
        }
        let o1 = self.options(0, lat, r1.0, r1.1, tol);
        let o2 = self.options(1, lat, r2.0, r2.1, tol);
        let o3 = self.options(2, lat, r3.0, r3.1, tol);
        let slot = |s: Stability| match s {
            Stability::Stable => 0,
            Stability::Unstable => 1,
        };
        let mut out = Vec::new();
        for i2 in r2.0..=r2.1 {
            for i3 in r3.0..=r3.1 {
                let i1 = i2 + i3;
                if i1 > r1.1 {
                    break;
                }
                let c = [lat.flux(i1), lat.flux(i2), lat.flux(i3)];
                let row = [
                    &o1[(i1 - r1.0) as usize],
                    &o2[(i2 - r2.0) as usize],
                    &o3[(i3 - r3.0) as usize],
                ];
                for pattern in LayerPattern::ALL {
                    let opts = [0, 1, 2].map(|k| row[k][slot(pattern.0[k])]);
                    let [Some(a), Some(b), Some(d)] = opts else { continue };
                    if let Some((case, traces, unique)) = couple([a, b, d], c) {
                        out.push(Candidate {
                            idx: (i2, i3),
                            c,
                            pattern,
                            case,
                            traces,
                            unique,
                            rho_k: [a.rho_k, b.rho_k, d.rho_k],
                        });
                        break;
                    }
                }
            }
        }
        out
    }
}

/// Check the four coupling relations on the trace domains, each inflated by
/// half of its own road's tolerance.
fn couple(o: [RoadOption; 3], c: [f64; 3]) -> Option<(NoPrefCase, [f64; 3], [bool; 3])> {
    let h = o.map(|x| 0.5 * x.tol);
    let lo = [0, 1, 2].map(|k| o[k].lo - h[k]);
    let hi = [0, 1, 2].map(|k| o[k].hi + h[k]);
    let narrow = |a: f64, b: f64, ks: &[usize]| b - a <= ks.iter().map(|&k| o[k].tol).sum::<f64>();

    let a = lo[0].max(lo[1]).max(lo[2]).max(c[0] - h[0]);
    let b = hi[0].min(hi[1]).min(hi[2]);
    if a <= b {
        let r = 0.5 * (a + b);
        let u = narrow(a, b, &[0, 1, 2]);
        return Some((NoPrefCase::I, [r; 3], [u; 3]));
    }
    if c[0] >= lo[0] && c[0] <= hi[0] {
        let a = lo[1].max(lo[2]);
        let b = hi[1].min(hi[2]).min(c[0] + h[1].max(h[2]));
        if a <= b {
            let r = 0.5 * (a + b);
            let u = narrow(a, b, &[1, 2]);
            return Some((NoPrefCase::II, [c[0], r, r], [true, u, u]));
        }
    }
    for (zero, other, case) in [(1, 2, NoPrefCase::III), (2, 1, NoPrefCase::IV)] {
        if c[zero] != 0.0 {
            continue;
        }
        let a = lo[0].max(lo[other]).max(c[0] - h[0]);
        let b = hi[0].min(hi[other]);
        if a <= b && hi[zero] >= a {
            let r = 0.5 * (a + b);
            let mut traces = [r; 3];
            traces[zero] = r.max(o[zero].lo);
            let mut unique = [narrow(a, b, &[0, other]); 3];
            unique[zero] = narrow(o[zero].lo, o[zero].hi, &[zero]);
            return Some((case, traces, unique));
        }
    }
    None
}

struct Leaf {
    centroid: [f64; 3],
    best: Candidate,
}

fn clusters(cands: &[Candidate]) -> Vec<Vec<Candidate>> {
    let index: HashMap<(u64, u64), usize> = cands.iter().enumerate().map(|(k, c)| (c.idx, k)).collect();
    let mut parent: Vec<usize> = (0..cands.len()).collect();
    fn root(p: &mut [usize], mut k: usize) -> usize {
        while p[k] != k {
            p[k] = p[p[k]];
            k = p[k];
        }
        k
    }
    for (k, cand) in cands.iter().enumerate() {
        let (i2, i3) = cand.idx;
        for d2 in -2i64..=2 {
            for d3 in -2i64..=2 {
                let key = ((i2 as i64 + d2) as u64, (i3 as i64 + d3) as u64);
                if let Some(&j) = index.get(&key) {
                    let (a, b) = (root(&mut parent, k), root(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Candidate>)> = Vec::new();
    for (k, cand) in cands.iter().enumerate() {
        let r = root(&mut parent, k);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(*cand),
            None => groups.push((r, vec![*cand])),
        }
    }
    groups.into_iter().map(|g| g.1).collect()
}

fn extent(group: &[Candidate]) -> f64 {
    (0..3)
        .map(|k| {
            let (lo, hi) = group
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| (a.min(c.c[k]), b.max(c.c[k])));
            hi - lo
        })
        .fold(0.0, f64::max)
}

fn leaf(group: &[Candidate]) -> Leaf {
    let n = group.len() as f64;
    let centroid = [0, 1, 2].map(|k| group.iter().map(|c| c.c[k]).sum::<f64>() / n);
    let dist = |c: &Candidate| (0..3).map(|k| (c.c[k] - centroid[k]).abs()).fold(0.0, f64::max);
    let best = *group
        .iter()
        .min_by(|a, b| dist(a).total_cmp(&dist(b)))
        .expect("non-empty cluster");
    Leaf { centroid, best }
}

impl Context<'_> {
    fn refine(&self, group: Vec<Candidate>, lat: Lattice, level: u32, leaves: &mut Vec<Leaf>) {
        let resolved = lat.step() <= self.cfg.flux_tol && extent(&group) <= self.cfg.flux_tol;
        if resolved || level >= self.cfg.max_levels {
            leaves.push(leaf(&group));
            return;
        }
        let r = self.cfg.refine;
        let fine = Lattice {
            n: lat.n * r,
            sigma: lat.sigma,
        };
        let span = |sel: fn(&Candidate) -> u64| {
            let lo = group.iter().map(sel).min().unwrap();
            let hi = group.iter().map(sel).max().unwrap();
            (lo.saturating_sub(2) * r, ((hi + 2) * r).min(fine.n))
        };
        let r2 = span(|c| c.idx.0);
        let r3 = span(|c| c.idx.1);
        let tol = self.cfg.density_tol() / r.pow(level + 1) as f64;
        let cands = self.scan(fine, r2, r3, tol);
        for sub in clusters(&cands) {
            self.refine(sub, fine, level + 1, leaves);
        }
    }
}

/// Resolve the no-preference diverge for far-field densities `rho_b`.
pub fn match_node_oracle(rho_b: [f64; 3], f: &FluxFunction, cfg: OracleConfig) -> Result<OracleResolution> {
    for r in rho_b {
        check_density(r)?;
    }
    let sets = [
        half_riemann_set(Side::Right, rho_b[0], f)?,
        half_riemann_set(Side::Left, rho_b[1], f)?,
        half_riemann_set(Side::Left, rho_b[2], f)?,
    ];
    let ctx = Context { f, sets, cfg };
    let base = Lattice {
        n: cfg.grid_n,
        sigma: f.sigma(),
    };
    let cands = ctx.scan(base, (0, base.n), (0, base.n), cfg.density_tol());
    let base_candidates = cands.len();
    let mut leaves = Vec::new();
    for group in clusters(&cands) {
        ctx.refine(group, base, 0, &mut leaves);
    }
    if leaves.is_empty() {
        return Err(Error::OracleFailure(rho_b));
    }
    leaves.sort_by(|a, b| {
        a.centroid
            .iter()
            .zip(&b.centroid)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let first = &leaves[0];
    let far = |l: &Leaf| (0..3).any(|k| (l.centroid[k] - first.centroid[k]).abs() > cfg.distinct_tol());
    let mut alternatives: Vec<[f64; 3]> = Vec::new();
    for l in leaves.iter().filter(|l| far(l)) {
        let dup = alternatives
            .iter()
            .any(|a| (0..3).all(|k| (a[k] - l.centroid[k]).abs() <= cfg.distinct_tol()));
        if !dup {
            alternatives.push(l.centroid);
        }
    }
    let best = first.best;
    Ok(OracleResolution {
        resolution: NodeResolution {
            fluxes: first.centroid,
            traces: [0, 1, 2].map(|k| {
                Some(Trace {
                    value: best.traces[k],
                    unique: best.unique[k],
                })
            }),
            rho_k: best.rho_k,
            label: ResolutionLabel::Oracle {
                layers: best.pattern,
                coupling: best.case,
            },
        },
        alternatives,
        base_candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::junction::theorem1_resolve;

    #[test]
    fn matches_closed_form_on_examples() {
        let f = FluxFunction::lwr();
        for rho_b in [[0.7, 0.2, 0.1], [0.2, 0.4, 0.6], [0.6, 0.1, 0.95], [0.8, 0.9, 0.7]] {
            let o = match_node_oracle(rho_b, &f, OracleConfig::with_grid(100)).unwrap();
            let t = theorem1_resolve(rho_b, &f).unwrap();
            assert!(!o.is_ambiguous(), "{rho_b:?}: {:?}", o.alternatives);
            for k in 0..3 {
                assert!(
                    (o.resolution.fluxes[k] - t.fluxes[k]).abs() < 1e-4,
                    "{rho_b:?}: {:?} vs {:?}",
                    o.resolution.fluxes,
                    t.fluxes
                );
            }
        }
    }
}
