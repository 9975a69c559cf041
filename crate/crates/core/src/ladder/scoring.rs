//! Mean-field operator scores and candidate queues.

use crate::hamio::{antisymmetrized, mp2_amplitude, IntegralSet};
use crate::pools::Excitation;
use crate::resources::CostModel;

use super::config::{LadderConfig, Preset};

/// Couplings below this are treated as vanishing.
pub const NEGLIGIBLE_COUPLING: f64 = 1e-8;

fn locality(cfg: &LadderConfig, o: &Excitation) -> f64 {
    if cfg.locality_lambda > 0.0 {
        (-(o.span() as f64) / cfg.locality_lambda).exp()
    } else {
        1.0
    }
}

/// Occupied and virtual spin orbitals touched by `o` relative to the
/// reference, when `o` acts on it as an occupied-to-virtual excitation.
fn particle_hole(ints: &IntegralSet, o: &Excitation) -> Option<(Vec<usize>, Vec<usize>)> {
    let occ = ints.hf_occupation();
    let (mut holes, mut particles) = (Vec::new(), Vec::new());
    for p in o.indices() {
        if occ.is_set(p) {
            holes.push(p);
        } else {
            particles.push(p);
        }
    }
    (holes.len() == particles.len()).then_some((holes, particles))
}

/// First-order amplitude magnitude of a double `ij -> ab`, or zero when the
/// excitation is not occupied-to-virtual.
pub fn double_amplitude(ints: &IntegralSet, o: &Excitation) -> f64 {
    match (o, particle_hole(ints, o)) {
        (Excitation::Double { .. }, Some((h, p))) if h.len() == 2 => mp2_amplitude(ints, h[0], h[1], p[0], p[1]).value,
        _ => 0.0,
    }
}

/// Preset-specific non-negative score of `o` at bond length `bond`.
pub fn score_excitation(cfg: &LadderConfig, o: &Excitation, ints: &IntegralSet, bond: f64, cost: &CostModel) -> f64 {
    let Some((holes, particles)) = particle_hole(ints, o) else {
        return 0.0;
    };
    let base = match o {
        Excitation::Single { .. } => {
            if holes.len() != 1 {
                return 0.0;
            }
            let gap = ints.spin_orbital_energy(particles[0]) - ints.spin_orbital_energy(holes[0]);
            cfg.single_weight / (gap.abs() + cfg.gap_delta)
        }
        Excitation::Double { .. } => {
            if holes.len() != 2 {
                return 0.0;
            }
            let (i, j, a, b) = (holes[0], holes[1], particles[0], particles[1]);
            let coupling = antisymmetrized(ints, a, b, i, j).abs();
            if coupling < NEGLIGIBLE_COUPLING {
                return 0.0;
            }
            let t = mp2_amplitude(ints, i, j, a, b).value.abs();
            if cfg.preset == Preset::H2o {
                let weak = !o.is_paired() && t < cfg.weak_double_cutoff;
                if weak && bond >= 2.0 && !cfg.in_critical_window(bond) {
                    return 0.0;
                }
            }
            if o.is_paired() {
                t * cfg.paired_boost.eval(bond)
            } else {
                t
            }
        }
    };
    let mut s = base * locality(cfg, o);
    if cfg.cost_gamma > 0.0 {
        s /= 1.0 + cfg.cost_gamma * cost.cost(o) as f64;
    }
    s.max(0.0)
}

/// Stable descending sort by score, dropping scores below `eps` and keeping
/// at most `limit` entries.
pub fn build_queue(scored: &[(Excitation, f64)], eps: f64, limit: Option<usize>) -> Vec<(Excitation, f64)> {
    let mut q: Vec<(Excitation, f64)> = scored.iter().copied().filter(|(_, s)| *s >= eps).collect();
    q.sort_by(|a, b| b.1.total_cmp(&a.1));
    if let Some(k) = limit {
        q.truncate(k);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn queue_sorting_is_stable() {
        let ops: Vec<Excitation> = (2..6).map(|a| Excitation::single(0, a).unwrap()).collect();
        let flat: Vec<_> = ops.iter().map(|o| (*o, 1.0)).collect();
        let q = build_queue(&flat, 0.0, None);
        assert_eq!(q.iter().map(|x| x.0).collect::<Vec<_>>(), ops);

        let scored: Vec<_> = ops.iter().zip([0.1, 0.5, 0.0, 0.5]).map(|(o, s)| (*o, s)).collect();
        let q = build_queue(&scored, 0.05, Some(2));
        assert_eq!(q, vec![(ops[1], 0.5), (ops[3], 0.5)]);
    }
}
