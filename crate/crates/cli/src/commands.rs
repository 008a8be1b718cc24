use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use negwit::divisibility::{enm_decomposition, enm_intermediate_choi, is_cp, CP_TOL};
use negwit::dynamics::{enm_channel, integrate_rates, EnmParams, PauliChannel, RateFunctions};
use negwit::profiles::{contractive_scan, contractive_scan_family, match_profile, max_increase, MONOTONE_TOL};
use negwit::random::{random_mixed_state, random_state};
use negwit::states::{negativity, BlochVector, ContractiveFunction, DensityMatrix, HermitianUnitTrace, Operator};
use negwit::witness::{
    analytic_trace_norm_with, build_scenario, right_derivative, t_up, witness_negativity, NegativityMethod,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::table::{num, opt_num, Table};
use crate::{Kind, RunConfig};

/// Agreement required between the full and shortcut negativity and the closed form.
const CURVE_TOL: f64 = 1e-9;
/// Simpson intervals for injected rates.
const RATE_STEPS: usize = 1000;

pub struct Report {
    pub table: Table,
    /// Whether every property checked by the command held.
    pub held: bool,
}

fn params(cfg: &RunConfig) -> Result<EnmParams> {
    Ok(EnmParams::new(cfg.alpha, cfg.c)?)
}

fn uniform_grid(cfg: &RunConfig) -> Vec<f64> {
    let n = cfg.steps;
    (0..n).map(|k| cfg.tmax * k as f64 / (n - 1) as f64).collect()
}

fn common_meta(table: &mut Table, cfg: &RunConfig, command: &str) {
    table.meta("command", command);
    table.meta("alpha", num(cfg.alpha));
    table.meta("c", num(cfg.c));
    table.meta("seed", cfg.seed);
}

fn status(held: bool) -> &'static str {
    if held {
        "held"
    } else {
        "violated"
    }
}

fn contractive(kind: Kind, renyi_order: f64) -> Result<ContractiveFunction> {
    Ok(match kind {
        Kind::TraceDistance => ContractiveFunction::TraceDistance,
        Kind::Infidelity => ContractiveFunction::Infidelity,
        Kind::RelativeEntropy => ContractiveFunction::RelativeEntropy,
        Kind::Renyi => {
            ensure!(
                renyi_order > 0.0 && renyi_order != 1.0 && renyi_order.is_finite(),
                "--renyi-order must be positive and != 1, got {renyi_order}"
            );
            ContractiveFunction::Renyi(renyi_order)
        }
        Kind::Negativity => bail!("negativity is not a two-state contractive function here"),
    })
}

/// Uniform grid with `t*` inserted so the kink is sampled exactly.
pub fn fig1(cfg: &RunConfig) -> Result<Report> {
    let p = params(cfg)?;
    let s = build_scenario(p, cfg.tstar)?;
    let tu = t_up(p, cfg.tstar);
    let mut times = uniform_grid(cfg);
    if cfg.tstar <= cfg.tmax && !times.contains(&cfg.tstar) {
        let at = times.partition_point(|&t| t < cfg.tstar);
        times.insert(at, cfg.tstar);
    }

    let mut table = Table::new(&["t", "negativity_full", "negativity_shortcut", "analytic_half_trace_distance"]);
    let (mut method_gap, mut analytic_gap) = (0.0f64, 0.0f64);
    for &t in &times {
        let full = witness_negativity(&s, t, NegativityMethod::Full)?;
        let short = witness_negativity(&s, t, NegativityMethod::Shortcut)?;
        let analytic = 0.25 * analytic_trace_norm_with(&s, t, tu);
        method_gap = method_gap.max((full - short).abs());
        analytic_gap = analytic_gap.max((analytic - short).abs());
        table.push(vec![num(t), num(full), num(short), num(analytic)]);
    }
    let held = method_gap <= CURVE_TOL && analytic_gap <= CURVE_TOL;
    common_meta(&mut table, cfg, "fig1");
    table.meta("t_star", num(cfg.tstar));
    table.meta("lambda_star", num(s.lambda_star));
    table.meta("right_derivative", num(right_derivative(&s)));
    table.meta("t_up", opt_num(tu));
    table.meta("max_full_shortcut_gap", num(method_gap));
    table.meta("max_analytic_gap", num(analytic_gap));
    table.meta("status", status(held));
    Ok(Report { table, held })
}

fn interval_pairs(cfg: &RunConfig, s: &[f64], t: &[f64], grid_points: usize) -> Result<Vec<(f64, f64)>> {
    let pairs: Vec<(f64, f64)> = match (s.len(), t.len()) {
        (0, 0) => {
            ensure!(grid_points >= 1, "--grid-points must be >= 1");
            let g: Vec<f64> = (0..grid_points)
                .map(|k| if grid_points == 1 { 0.0 } else { cfg.tmax * k as f64 / (grid_points - 1) as f64 })
                .collect();
            g.iter()
                .enumerate()
                .flat_map(|(j, &tj)| g[..=j].iter().map(move |&si| (si, tj)))
                .collect()
        }
        (0, _) | (_, 0) => bail!("--s and --t must be given together"),
        (a, b) if a == b => s.iter().copied().zip(t.iter().copied()).collect(),
        (_, 1) => s.iter().map(|&si| (si, t[0])).collect(),
        (1, _) => t.iter().map(|&ti| (s[0], ti)).collect(),
        (a, b) => bail!("--s has {a} values but --t has {b}"),
    };
    for &(si, ti) in &pairs {
        ensure!(si.is_finite() && ti.is_finite() && si >= 0.0, "invalid pair (s, t) = ({si}, {ti})");
        ensure!(si <= ti, "s = {si} > t = {ti}: intermediate maps need s <= t");
    }
    Ok(pairs)
}

pub fn divisibility(cfg: &RunConfig, s: &[f64], t: &[f64], grid_points: usize) -> Result<Report> {
    let p = params(cfg)?;
    let pairs = interval_pairs(cfg, s, t, grid_points)?;
    let mut table = Table::new(&["s", "t", "min_eigenvalue", "cp", "p1", "p2", "p3", "residual", "valid"]);
    let mut invalid = 0;
    let mut not_cp = 0;
    for (si, ti) in pairs {
        let verdict = is_cp(&enm_intermediate_choi(p, si, ti)?, CP_TOL);
        let w = enm_decomposition(p, si, ti)?;
        invalid += usize::from(!w.is_valid());
        not_cp += usize::from(!verdict.cp);
        table.push(vec![
            num(si),
            num(ti),
            num(verdict.min_eigenvalue),
            Value::from(verdict.cp),
            num(w.p1),
            num(w.p2),
            num(w.p3()),
            num(w.residual),
            Value::from(w.is_valid()),
        ]);
    }
    common_meta(&mut table, cfg, "divisibility");
    table.meta("non_cp_pairs", not_cp);
    table.meta("invalid_decompositions", invalid);
    table.meta("status", status(invalid == 0));
    Ok(Report { table, held: invalid == 0 })
}

fn two_qubit_negativity(ch: &PauliChannel, rho: &DensityMatrix) -> Result<f64> {
    let out = ch.apply_local(rho.matrix(), &[2, 2], 0)?;
    Ok(negativity(&HermitianUnitTrace::new(out, vec![2, 2])?, 1)?)
}

pub fn scan(cfg: &RunConfig, kind: Kind, renyi_order: f64, trials: usize, rates: Option<&[f64]>) -> Result<Report> {
    let p = params(cfg)?;
    let grid = uniform_grid(cfg);
    let dynamics = match rates {
        Some(&[g1, g2, g3]) => {
            ensure!([g1, g2, g3].iter().all(|g| g.is_finite()), "--rates must be finite");
            let r = RateFunctions::constant(g1, g2, g3);
            grid.iter()
                .map(|&t| integrate_rates(&r, t, RATE_STEPS))
                .collect::<negwit::Result<Vec<_>>>()?
        }
        Some(other) => bail!("--rates takes three values G1,G2,G3, got {}", other.len()),
        None => grid.iter().map(|&t| enm_channel(p, t)).collect::<negwit::Result<Vec<_>>>()?,
    };
    let function = match kind {
        Kind::Negativity => None,
        k => Some(contractive(k, renyi_order)?),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = Table::new(&["trial", "initial", "final", "max_increase"]);
    let mut worst = (0.0f64, None::<usize>);
    for trial in 0..trials {
        let series = match function {
            Some(f) => {
                let rho = random_mixed_state(&mut rng, &[2]);
                let sigma = random_mixed_state(&mut rng, &[2]);
                contractive_scan_family(f, |t| Ok(dynamics[index_of(&grid, t)]), &rho, &sigma, &grid)
                    .with_context(|| format!("trial {trial}"))?
            }
            None => {
                let rho = random_state(&mut rng, &[2, 2], 1 + trial % 4);
                dynamics
                    .iter()
                    .map(|ch| two_qubit_negativity(ch, &rho))
                    .collect::<Result<Vec<_>>>()
                    .with_context(|| format!("trial {trial}"))?
            }
        };
        let inc = max_increase(&series);
        if inc > worst.0 || worst.1.is_none() {
            worst = (inc.max(worst.0), Some(trial));
        }
        table.push(vec![
            Value::from(trial),
            num(series[0]),
            num(*series.last().expect("grid has >= 2 points")),
            num(inc),
        ]);
    }
    let held = worst.0 <= MONOTONE_TOL;
    common_meta(&mut table, cfg, "scan");
    table.meta(
        "kind",
        function.map_or_else(|| "negativity".to_string(), |f| f.name()),
    );
    table.meta(
        "dynamics",
        match rates {
            Some(r) => format!("rates:{}", r.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(",")),
            None => "enm".to_string(),
        },
    );
    table.meta("t_max", num(cfg.tmax));
    table.meta("steps", cfg.steps);
    table.meta("trials", trials);
    table.meta("max_increase", num(worst.0));
    table.meta("worst_trial", worst.1.map_or(Value::Null, Value::from));
    table.meta("tolerance", num(MONOTONE_TOL));
    table.meta("status", status(held));
    Ok(Report { table, held })
}

/// Position of `t` in the grid the scan was built from.
fn index_of(grid: &[f64], t: f64) -> usize {
    grid.partition_point(|&g| g < t)
}

fn bloch_state(v: &[f64], flag: &str) -> Result<DensityMatrix> {
    let &[x, y, z] = v else {
        bail!("--{flag} takes three Bloch components, got {}", v.len());
    };
    BlochVector::new(x, y, z)
        .to_state()
        .with_context(|| format!("--{flag} = ({x}, {y}, {z}) is not a Bloch vector"))
}

/// Reads `t,target` rows. Commas or whitespace separate the fields.
pub fn read_targets(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let (mut times, mut targets) = (Vec::new(), Vec::new());
    let mut seen_data = false;
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[t, y]) => {
                times.push(t);
                targets.push(y);
                seen_data = true;
            }
            None if !seen_data => continue, // header
            _ => bail!("{}:{}: expected `t,target`, got {line:?}", path.display(), k + 1),
        }
    }
    ensure!(!times.is_empty(), "{} has no data rows", path.display());
    Ok((times, targets))
}

pub fn profile_match(
    cfg: &RunConfig,
    targets_path: Option<&Path>,
    kind: Kind,
    renyi_order: f64,
    rho: &[f64],
    sigma: &[f64],
) -> Result<Report> {
    let f = contractive(kind, renyi_order)?;
    let rho0 = bloch_state(rho, "rho")?;
    let sigma0 = bloch_state(sigma, "sigma")?;
    let (times, targets, source) = match targets_path {
        Some(path) => {
            let (t, y) = read_targets(path)?;
            (t, y, path.display().to_string())
        }
        None => {
            let t = uniform_grid(cfg);
            let y = contractive_scan(f, params(cfg)?, &rho0, &sigma0, &t)?;
            (t, y, "enm".to_string())
        }
    };
    let m = match_profile(&times, &targets, f, &rho0, &sigma0)?;
    let mut table = Table::new(&["t", "target", "a", "achieved", "error", "infeasible"]);
    for i in 0..m.times.len() {
        table.push(vec![
            num(m.times[i]),
            num(m.targets[i]),
            num(m.a[i]),
            num(m.achieved[i]),
            num((m.achieved[i] - m.targets[i]).abs()),
            Value::from(m.infeasible[i]),
        ]);
    }
    let held = m.is_matched();
    common_meta(&mut table, cfg, "profile-match");
    table.meta("kind", f.name());
    table.meta("source", source);
    table.meta("rho", format!("{rho:?}"));
    table.meta("sigma", format!("{sigma:?}"));
    table.meta("max_error", num(m.max_error()));
    table.meta("first_infeasible", m.first_infeasible().map_or(Value::Null, Value::from));
    table.meta("status", status(held));
    Ok(Report { table, held })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Format;

    fn cfg() -> RunConfig {
        RunConfig {
            alpha: 2.0,
            c: 0.5,
            tstar: 1.0,
            tmax: 6.0,
            steps: 61,
            seed: 7,
            format: Format::Csv,
            out: None,
        }
    }

    #[test]
    fn default_pairs_cover_the_upper_triangle() {
        let pairs = interval_pairs(&cfg(), &[], &[], 3).unwrap();
        assert_eq!(pairs, [(0.0, 0.0), (0.0, 3.0), (3.0, 3.0), (0.0, 6.0), (3.0, 6.0), (6.0, 6.0)]);
        assert!(interval_pairs(&cfg(), &[2.0], &[1.0], 3).is_err());
        assert!(interval_pairs(&cfg(), &[1.0, 2.0, 3.0], &[4.0, 5.0], 3).is_err());
    }

    #[test]
    fn fig1_inserts_t_star() {
        let mut c = cfg();
        c.tstar = 0.01;
        c.tmax = 1.0;
        c.steps = 11;
        let r = fig1(&c).unwrap();
        assert!(r.held);
        let mut buf = Vec::new();
        r.table.write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2 + 12);
        assert!(text.lines().nth(3).unwrap().starts_with("1.00000000000e-2,"));
    }

    #[test]
    fn scan_index_lookup_is_exact_on_the_grid() {
        let g = uniform_grid(&cfg());
        assert!(g.iter().enumerate().all(|(k, &t)| index_of(&g, t) == k));
    }
}
