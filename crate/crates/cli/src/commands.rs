use crate::args::{
    BoundsArgs, Cli, Command, ComplexityArgs, CrcSearchArgs, ListrankArgs, SimModeArg,
    SimulateArgs, SpectrumArgs, SpectrumMethod,
};
use crate::config::{self, RunRecord, DEFAULT_SEED, GIT_REV};
use crate::output::{write_json, Sink};
use crate::{CliError, CliResult};
use crcconv::bounds;
use crcconv::complexity;
use crcconv::convcode::{amplitude_from_db, CodeConfig, CodeSpec, Termination};
use crcconv::dso::{self, DistanceSpectrum, DsoResult, IeeCache, IeeSet};
use crcconv::gf2poly::CrcScheme;
use crcconv::listrank::{self, OnionGeometry};
use crcconv::sim::{self, SimMode, SimReport, StopRule, TrialPlan, ORIGIN_PSI_CAP};
use serde::Serialize;
use std::path::Path;

pub fn dispatch(cli: &Cli) -> CliResult<()> {
    let sink = Sink::new(cli.out.as_deref())?;
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let cfg_path = cli.config.as_deref();
    let name = cli.command.name();
    match &cli.command {
        Command::CrcSearch(a) => {
            let code = config::load_code(cfg_path, &a.code)?;
            cmd_crc_search(&sink, name, seed, &code, a)
        }
        Command::Spectrum(a) => {
            let code = config::load_code(cfg_path, &a.code)?;
            cmd_spectrum(&sink, name, seed, &code, a)
        }
        Command::Simulate(a) => {
            let code = config::load_code(cfg_path, &a.code)?;
            cmd_simulate(&sink, name, seed, &code, a)
        }
        Command::Bounds(a) => {
            let code = config::load_code(cfg_path, &a.code)?;
            cmd_bounds(&sink, name, seed, &code, a)
        }
        Command::Listrank(a) => {
            let code = config::load_code(cfg_path, &a.code)?;
            cmd_listrank(&sink, name, seed, &code, a)
        }
        Command::Complexity(a) => {
            let code = config::load_code(cfg_path, &a.code)?;
            cmd_complexity(&sink, name, seed, &code, a)
        }
    }
}

fn pow2_capped(bits: usize, cap: usize) -> usize {
    if bits >= usize::BITS as usize - 1 {
        cap
    } else {
        cap.min(1 << bits)
    }
}

// ---------------------------------------------------------------- crc-search

/// One row of the CRC search table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchRow {
    pub mode: &'static str,
    pub k: usize,
    pub m: usize,
    pub crc_hex: String,
    pub dmin_l: Option<u32>,
    pub c_dmin: Option<u128>,
    pub wstar2: u32,
    pub dtilde: u32,
    pub candidates: usize,
    pub inconclusive: bool,
    pub iee_count: usize,
    pub audit: Option<String>,
}

fn load_or_collect_iees(spec: &CodeSpec, dtilde: u32, cache: Option<&Path>) -> CliResult<IeeSet> {
    if let Some(p) = cache {
        if let Ok(text) = std::fs::read_to_string(p) {
            match serde_json::from_str::<IeeCache>(&text) {
                Ok(c) if c.matches(spec, dtilde) => {
                    log::info!("IEE cache hit: {}", p.display());
                    return Ok(c.to_set()?);
                }
                Ok(_) => log::info!(
                    "IEE cache {} does not cover this run; rebuilding",
                    p.display()
                ),
                Err(e) => log::warn!("ignoring unreadable IEE cache {}: {e}", p.display()),
            }
        }
    }
    let set = dso::collect_iees(spec, dtilde, dso::MAX_WORD_LEN)?;
    if let Some(p) = cache {
        write_json(p, &IeeCache::from_set(spec, &set))?;
        log::info!("IEE cache written: {}", p.display());
    }
    Ok(set)
}

/// DSO search for each CRC degree in `ms` on the convolutional code `base`.
pub fn crc_search(
    base: &CodeSpec,
    ms: &[usize],
    dtilde: Option<u32>,
    cache: Option<&Path>,
) -> CliResult<Vec<(SearchRow, DsoResult)>> {
    let mut plan = Vec::with_capacity(ms.len());
    for &m in ms {
        let spec = base.with_m(m);
        let (w2, _) = dso::wstar_for(&spec, m)?;
        plan.push((spec, dtilde.unwrap_or(w2 + 1)));
    }
    let dt_max = plan.iter().map(|p| p.1).max().unwrap_or(1);
    let iees = load_or_collect_iees(base, dt_max, cache)?;
    let mut out = Vec::with_capacity(plan.len());
    for (spec, dt) in plan {
        let res = dso::dso_search(&spec, Some(dt), Some(&iees))?;
        let s = &res.sieve;
        let row = SearchRow {
            mode: spec.mode.label(),
            k: spec.k,
            m: spec.m,
            crc_hex: s.crc_hex.clone(),
            dmin_l: s.dmin_l,
            c_dmin: s.c_dmin,
            wstar2: res.wstar2,
            dtilde: s.dtilde,
            candidates: s.candidates,
            inconclusive: s.inconclusive,
            iee_count: res.iee_count,
            audit: None,
        };
        out.push((row, res));
    }
    Ok(out)
}

fn cmd_crc_search(
    sink: &Sink,
    name: &'static str,
    seed: u64,
    code: &CodeConfig,
    a: &CrcSearchArgs,
) -> CliResult<()> {
    let base = config::code_without_crc(code)?;
    let ms = a.m_values.clone().unwrap_or_else(|| vec![code.m]);
    let mut results = crc_search(&base, &ms, a.dtilde, a.cache.as_deref())?;
    if let Some(dir) = sink.dir() {
        for (row, res) in &mut results {
            let rel = format!("audit/crc_search_{}_k{}_m{}.json", row.mode, row.k, row.m);
            write_json(&dir.join(&rel), &res.sieve)?;
            row.audit = Some(rel);
        }
    }
    let record = RunRecord {
        command: name,
        version: env!("CARGO_PKG_VERSION"),
        git_rev: GIT_REV,
        seed,
        code,
        params: a,
    };
    let (mut w, _) = sink.csv(name, &record, false)?;
    for (row, _) in &results {
        w.serialize(row)?;
    }
    w.flush()?;
    #[derive(Serialize)]
    struct Report<'a, R: Serialize> {
        run: &'a R,
        rows: Vec<&'a SearchRow>,
        results: Vec<&'a DsoResult>,
    }
    sink.json(
        name,
        &Report {
            run: &record,
            rows: results.iter().map(|r| &r.0).collect(),
            results: results.iter().map(|r| &r.1).collect(),
        },
    )?;
    let bad: Vec<String> = results
        .iter()
        .filter(|r| r.0.inconclusive)
        .map(|r| format!("m={}", r.0.m))
        .collect();
    if !bad.is_empty() {
        return Err(CliError::inconclusive(format!(
            "sieve ties persisted to d̃−1 for {}; raise --dtilde",
            bad.join(", ")
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------- spectrum

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub dtilde: u32,
    pub method: SpectrumMethod,
    pub b: Vec<u128>,
    pub c: Vec<u128>,
    pub dmin_h: Option<u32>,
    pub dmin_l: Option<u32>,
    pub c_dmin_l: Option<u128>,
}

fn check_routes(what: &str, iee: &DistanceSpectrum, dp: &DistanceSpectrum) -> CliResult<()> {
    if iee.counts == dp.counts {
        return Ok(());
    }
    let d = iee
        .counts
        .iter()
        .zip(&dp.counts)
        .position(|(x, y)| x != y)
        .unwrap_or(0);
    Err(CliError::numeric(format!(
        "{what} spectra disagree at d={d}: IEE route {} vs DP route {}",
        iee.count(d as u32),
        dp.count(d as u32)
    )))
}

/// B_d and C_d for d < d̃ by the chosen route(s).
pub fn spectra(
    spec: &CodeSpec,
    crc: &CrcScheme,
    dtilde: u32,
    method: SpectrumMethod,
) -> CliResult<SpectrumReport> {
    if method != SpectrumMethod::Iee && crc.degree() > 20 {
        return Err(CliError::config(
            "the DP route supports m <= 20; use --method iee",
        ));
    }
    let (b, c) = match method {
        SpectrumMethod::Iee => (
            dso::distance_spectrum(spec, None, dtilde)?,
            dso::distance_spectrum(spec, Some(crc), dtilde)?,
        ),
        SpectrumMethod::Dp => (
            dso::spectrum_dp(spec, None, dtilde)?,
            dso::spectrum_dp(spec, Some(crc), dtilde)?,
        ),
        SpectrumMethod::Both => {
            let (bi, ci) = (
                dso::distance_spectrum(spec, None, dtilde)?,
                dso::distance_spectrum(spec, Some(crc), dtilde)?,
            );
            let (bd, cd) = (
                dso::spectrum_dp(spec, None, dtilde)?,
                dso::spectrum_dp(spec, Some(crc), dtilde)?,
            );
            check_routes("higher-rate", &bi, &bd)?;
            check_routes("lower-rate", &ci, &cd)?;
            (bi, ci)
        }
    };
    let dmin_l = c.dmin();
    Ok(SpectrumReport {
        dtilde,
        method,
        dmin_h: b.dmin(),
        dmin_l,
        c_dmin_l: dmin_l.map(|d| c.count(d)),
        b: b.counts,
        c: c.counts,
    })
}

fn cmd_spectrum(
    sink: &Sink,
    name: &'static str,
    seed: u64,
    code: &CodeConfig,
    a: &SpectrumArgs,
) -> CliResult<()> {
    let (spec, crc) = config::resolve(code)?;
    let rep = spectra(&spec, &crc, a.dtilde, a.method)?;
    let record = RunRecord {
        command: name,
        version: env!("CARGO_PKG_VERSION"),
        git_rev: GIT_REV,
        seed,
        code,
        params: a,
    };
    #[derive(Serialize)]
    struct Row {
        d: u32,
        b_d: u128,
        c_d: u128,
    }
    let (mut w, _) = sink.csv(name, &record, false)?;
    for d in 1..rep.dtilde {
        w.serialize(Row {
            d,
            b_d: rep.b[d as usize],
            c_d: rep.c[d as usize],
        })?;
    }
    w.flush()?;
    #[derive(Serialize)]
    struct Report<'a, R: Serialize> {
        run: &'a R,
        spectrum: &'a SpectrumReport,
    }
    sink.json(
        name,
        &Report {
            run: &record,
            spectrum: &rep,
        },
    )?;
    match (rep.dmin_l, rep.c_dmin_l) {
        (Some(d), Some(c)) => eprintln!("d_min = {d}, C_{d} = {c} (CRC {})", crc.to_hex()),
        _ => eprintln!("no lower-rate codeword below d̃ = {}", rep.dtilde),
    }
    Ok(())
}

// ---------------------------------------------------------------- simulate

pub fn sim_plan(code: &CodeConfig, a: &SimulateArgs, seed: u64) -> TrialPlan {
    let (mode, default_psi) = match a.sim_mode {
        SimModeArg::Channel => (SimMode::Channel, 1024),
        SimModeArg::FixedNorm => (SimMode::FixedNorm, 1024),
        SimModeArg::Origin => (
            SimMode::Origin,
            pow2_capped(code.k + code.m, ORIGIN_PSI_CAP),
        ),
    };
    TrialPlan {
        code: code.clone(),
        mode,
        snr_db: a.snr.clone().map(|g| g.0).unwrap_or_default(),
        eta: a.eta.clone().map(|g| g.0).unwrap_or_default(),
        psi: a.psi.unwrap_or(default_psi),
        stop: StopRule {
            min_ue: a.min_ue,
            max_trials: a.max_trials,
        },
        seed,
        batch: a.batch,
        random_message: a.random_message,
    }
}

#[derive(Debug, Serialize)]
struct SimRow {
    mode: &'static str,
    x: f64,
    psi: usize,
    seed: u64,
    trials: u64,
    correct: u64,
    ue: u64,
    nack: u64,
    p_correct: f64,
    p_ue: f64,
    p_ue_lo: f64,
    p_ue_hi: f64,
    p_nack: f64,
    p_nack_lo: f64,
    p_nack_hi: f64,
    mean_rank: f64,
    mean_rank_lo: f64,
    mean_rank_hi: f64,
    mean_insertions: f64,
    max_insertions: u64,
    mean_tracebacks: f64,
}

fn cmd_simulate(
    sink: &Sink,
    name: &'static str,
    seed: u64,
    code: &CodeConfig,
    a: &SimulateArgs,
) -> CliResult<()> {
    config::resolve(code)?;
    let plan = sim_plan(code, a, seed);
    match plan.mode {
        SimMode::Channel if plan.snr_db.is_empty() => {
            return Err(CliError::config("channel mode needs --snr"))
        }
        SimMode::FixedNorm if plan.eta.is_empty() => {
            return Err(CliError::config("fixed-norm mode needs --eta"))
        }
        _ => {}
    }
    let report = sim::run(&plan)?;
    let record = RunRecord {
        command: name,
        version: env!("CARGO_PKG_VERSION"),
        git_rev: GIT_REV,
        seed,
        code,
        params: &plan,
    };
    let mode = match plan.mode {
        SimMode::Channel => "channel",
        SimMode::FixedNorm => "fixed-norm",
        SimMode::Origin => "origin",
    };
    let (mut w, _) = sink.csv(name, &record, true)?;
    for p in &report.points {
        let c = p.counts;
        w.serialize(SimRow {
            mode,
            x: p.x,
            psi: plan.psi,
            seed,
            trials: c.trials,
            correct: c.correct,
            ue: c.ue,
            nack: c.nack,
            p_correct: p.p_correct.value,
            p_ue: p.p_ue.value,
            p_ue_lo: p.p_ue.lo,
            p_ue_hi: p.p_ue.hi,
            p_nack: p.p_nack.value,
            p_nack_lo: p.p_nack.lo,
            p_nack_hi: p.p_nack.hi,
            mean_rank: p.mean_rank.value,
            mean_rank_lo: p.mean_rank.lo,
            mean_rank_hi: p.mean_rank.hi,
            mean_insertions: p.mean_insertions,
            max_insertions: c.max_insertions,
            mean_tracebacks: p.mean_tracebacks,
        })?;
    }
    w.flush()?;
    #[derive(Serialize)]
    struct Report<'a, R: Serialize> {
        run: &'a R,
        seed: u64,
        git_rev: &'static str,
        report: &'a SimReport,
    }
    sink.json(
        name,
        &Report {
            run: &record,
            seed,
            git_rev: GIT_REV,
            report: &report,
        },
    )?;
    Ok(())
}

// ---------------------------------------------------------------- bounds

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    pub snr_db: f64,
    pub union: f64,
    pub tub: f64,
    pub nn_pe1: f64,
    pub nack1: f64,
    pub rcu: f64,
    pub mc: f64,
}

fn spectrum_for_bounds(
    spec: &CodeSpec,
    crc: Option<&CrcScheme>,
    dtilde: u32,
) -> CliResult<DistanceSpectrum> {
    let m = crc.map_or(0, |c| c.degree());
    Ok(if m <= 20 {
        dso::spectrum_dp(spec, crc, dtilde)?
    } else {
        dso::distance_spectrum(spec, crc, dtilde)?
    })
}

/// Bound rows on an SNR grid. `union` sums the spectrum below `union_dtilde`.
pub fn bounds_rows(
    spec: &CodeSpec,
    crc: &CrcScheme,
    snr: &[f64],
    dtilde: u32,
    union_dtilde: u32,
) -> CliResult<Vec<BoundsRow>> {
    let len = union_dtilde.max(dtilde + 1);
    let c = spectrum_for_bounds(spec, Some(crc), len)?;
    let b = spectrum_for_bounds(spec, None, len)?;
    let (n, k, m) = (spec.n(), spec.k, spec.m);
    snr.iter()
        .map(|&db| {
            let a = amplitude_from_db(db);
            Ok(BoundsRow {
                snr_db: db,
                union: bounds::union_bound(&c, a),
                tub: bounds::tub(&c, a, dtilde),
                nn_pe1: bounds::nn_pe1(&c, a, m),
                nack1: bounds::nack1(&b, &c, a, m, dtilde),
                rcu: bounds::rcu_bound(n, k, a)?,
                mc: bounds::mc_bound(n, k, a)?,
            })
        })
        .collect()
}

fn cmd_bounds(
    sink: &Sink,
    name: &'static str,
    seed: u64,
    code: &CodeConfig,
    a: &BoundsArgs,
) -> CliResult<()> {
    let (spec, crc) = config::resolve(code)?;
    let rows = bounds_rows(
        &spec,
        &crc,
        &a.snr.0,
        a.dtilde,
        a.union_dtilde.unwrap_or(2 * a.dtilde),
    )?;
    let record = RunRecord {
        command: name,
        version: env!("CARGO_PKG_VERSION"),
        git_rev: GIT_REV,
        seed,
        code,
        params: a,
    };
    let (mut w, _) = sink.csv(name, &record, false)?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------- listrank

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ListrankTable {
    pub n: usize,
    pub eta: Vec<f64>,
    pub lbar: f64,
    pub lbar_source: &'static str,
    pub simulated_rank: Option<Vec<f64>>,
    pub parametric: Option<Vec<f64>>,
    pub onion: Vec<(usize, Vec<f64>)>,
    pub p_ue: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankAtSnr {
    pub snr_db: f64,
    pub simulated: Option<f64>,
    pub parametric: Option<f64>,
    pub onion: Vec<(usize, f64)>,
}

fn default_eta(n: usize) -> Vec<f64> {
    let rn = (n as f64).sqrt();
    (0..=20).map(|i| rn * (0.5 + 0.05 * i as f64)).collect()
}

pub fn listrank_table(code: &CodeConfig, a: &ListrankArgs, seed: u64) -> CliResult<ListrankTable> {
    let (spec, _) = config::resolve(code)?;
    let n = spec.n();
    let eta = a.eta.clone().map(|g| g.0).unwrap_or_else(|| default_eta(n));
    let psi = a
        .psi
        .unwrap_or_else(|| pow2_capped(spec.k + spec.m, ORIGIN_PSI_CAP));
    let plan = |mode, trials, seed| TrialPlan {
        code: code.clone(),
        mode,
        snr_db: vec![],
        eta: eta.clone(),
        psi,
        stop: StopRule {
            min_ue: u64::MAX,
            max_trials: trials,
        },
        seed,
        batch: 1024,
        random_message: false,
    };
    let (lbar, lbar_source) = match (a.lbar, a.origin_trials, spec.mode) {
        (Some(l), _, _) => (l, "given"),
        (None, t, _) if t > 0 => {
            let r = sim::run_origin(&plan(SimMode::Origin, t, seed.wrapping_add(1)))?;
            (r.points[0].mean_rank.value, "simulated")
        }
        (None, _, Termination::ZeroTail) => {
            log::warn!("using the ZT heuristic L̄ ≈ 2^m; pass --lbar or --origin-trials for a measured value");
            (2f64.powi(spec.m as i32), "heuristic-2^m")
        }
        (None, _, Termination::TailBiting) => {
            return Err(CliError::config(
                "TB codes need --lbar or --origin-trials (no 2^m heuristic)",
            ));
        }
    };
    let (simulated_rank, p_ue, parametric) = if a.trials > 0 {
        let r = sim::run_fixed_norm(&plan(SimMode::FixedNorm, a.trials, seed))?;
        let ranks: Vec<f64> = r.points.iter().map(|p| p.mean_rank.value).collect();
        let pe: Vec<f64> = r.points.iter().map(|p| p.p_ue.value).collect();
        let par = pe
            .iter()
            .map(|&p| listrank::parametric_cond(p, lbar))
            .collect();
        (Some(ranks), Some(pe), Some(par))
    } else {
        (None, None, None)
    };
    let mut onion = Vec::with_capacity(a.mu.len());
    for &mu in &a.mu {
        let geo = OnionGeometry::new(mu, spec.k, spec.m, n)?;
        onion.push((
            mu,
            eta.iter()
                .map(|&e| listrank::onion_cond_rank(e, &geo, lbar))
                .collect(),
        ));
    }
    Ok(ListrankTable {
        n,
        eta,
        lbar,
        lbar_source,
        simulated_rank,
        parametric,
        onion,
        p_ue,
    })
}

/// E[L] at each SNR by integrating every column of the table over the noise norm.
pub fn integrate_table(t: &ListrankTable, snr: &[f64]) -> CliResult<Vec<RankAtSnr>> {
    let col = |v: &[f64], a: f64| -> CliResult<f64> {
        let pts: Vec<(f64, f64)> = t.eta.iter().copied().zip(v.iter().copied()).collect();
        Ok(listrank::integrate_rank_over_noise(&pts, t.n, a)?)
    };
    snr.iter()
        .map(|&db| {
            let a = amplitude_from_db(db);
            Ok(RankAtSnr {
                snr_db: db,
                simulated: t.simulated_rank.as_deref().map(|v| col(v, a)).transpose()?,
                parametric: t.parametric.as_deref().map(|v| col(v, a)).transpose()?,
                onion: t
                    .onion
                    .iter()
                    .map(|(mu, v)| Ok((*mu, col(v, a)?)))
                    .collect::<CliResult<_>>()?,
            })
        })
        .collect()
}

fn cmd_listrank(
    sink: &Sink,
    name: &'static str,
    seed: u64,
    code: &CodeConfig,
    a: &ListrankArgs,
) -> CliResult<()> {
    let table = listrank_table(code, a, seed)?;
    let at_snr = integrate_table(&table, a.snr.as_ref().map_or(&[][..], |g| &g.0))?;
    let record = RunRecord {
        command: name,
        version: env!("CARGO_PKG_VERSION"),
        git_rev: GIT_REV,
        seed,
        code,
        params: a,
    };
    let (mut w, _) = sink.csv(name, &record, false)?;
    let mut header = vec![
        "eta".to_string(),
        "simulated_rank".into(),
        "parametric".into(),
    ];
    header.extend(table.onion.iter().map(|(mu, _)| format!("onion_mu{mu}")));
    header.push("p_ue".into());
    w.write_record(&header)?;
    let opt =
        |v: &Option<Vec<f64>>, i: usize| v.as_ref().map(|v| v[i].to_string()).unwrap_or_default();
    for (i, e) in table.eta.iter().enumerate() {
        let mut rec = vec![
            e.to_string(),
            opt(&table.simulated_rank, i),
            opt(&table.parametric, i),
        ];
        rec.extend(table.onion.iter().map(|(_, v)| v[i].to_string()));
        rec.push(opt(&table.p_ue, i));
        w.write_record(&rec)?;
    }
    w.flush()?;
    #[derive(Serialize)]
    struct Report<'a, R: Serialize> {
        run: &'a R,
        table: &'a ListrankTable,
        random_coding_rank: f64,
        expected_rank: &'a [RankAtSnr],
    }
    let (k, m) = (code.k as i32, code.m as i32);
    sink.json(
        name,
        &Report {
            run: &record,
            table: &table,
            random_coding_rank: listrank::random_coding_rank(2f64.powi(k + m), 2f64.powi(k)),
            expected_rank: &at_snr,
        },
    )?;
    Ok(())
}

// ---------------------------------------------------------------- complexity

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub kind: &'static str,
    pub snr_db: Option<f64>,
    pub mode: &'static str,
    pub k: usize,
    pub m: usize,
    pub nu: usize,
    pub el: Option<f64>,
    pub ei: Option<f64>,
    pub ei_source: Option<&'static str>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c_ssv: Option<f64>,
    pub c_trace: Option<f64>,
    pub c_list: Option<f64>,
    pub c_total: f64,
    pub normalized: Option<f64>,
    pub measured_mean_insertions: Option<f64>,
    pub measured_mean_tracebacks: Option<f64>,
    pub measured_max_insertions: Option<u64>,
    pub trials: Option<u64>,
    pub wava_iterations: Option<u32>,
}

impl ComplexityRow {
    fn model(
        kind: &'static str,
        b: &complexity::ComplexityBreakdown,
        ei_source: &'static str,
    ) -> Self {
        ComplexityRow {
            kind,
            snr_db: None,
            mode: b.mode.label(),
            k: b.k,
            m: b.m,
            nu: b.nu,
            el: Some(b.el),
            ei: Some(b.ei),
            ei_source: Some(ei_source),
            c1: Some(b.c1),
            c2: Some(b.c2),
            c_ssv: Some(b.c_ssv),
            c_trace: Some(b.c_trace),
            c_list: Some(b.c_list),
            c_total: b.c_total,
            normalized: Some(b.normalized),
            measured_mean_insertions: None,
            measured_mean_tracebacks: None,
            measured_max_insertions: None,
            trials: None,
            wava_iterations: None,
        }
    }
}

pub fn complexity_rows(
    code: &CodeConfig,
    a: &ComplexityArgs,
    seed: u64,
) -> CliResult<Vec<ComplexityRow>> {
    let (spec, _) = config::resolve(code)?;
    let (mode, k, m, nu) = (spec.mode, spec.k, spec.m, spec.nu);
    let mut rows = Vec::new();
    if let Some(el) = a.el {
        let b = complexity::breakdown(mode, k, m, nu, el, a.ei, a.c1, a.c2);
        rows.push(ComplexityRow::model(
            "model",
            &b,
            if a.ei.is_some() { "given" } else { "bound" },
        ));
    }
    if let Some(snr) = &a.snr {
        let plan = TrialPlan {
            code: code.clone(),
            mode: SimMode::Channel,
            snr_db: snr.0.clone(),
            eta: vec![],
            psi: a.psi,
            stop: StopRule {
                min_ue: a.min_ue,
                max_trials: a.max_trials,
            },
            seed,
            batch: 4096,
            random_message: false,
        };
        let rep = sim::run_channel(&plan)?;
        for p in &rep.points {
            let el = p.mean_rank.value;
            for (kind, ei, src) in [
                (
                    "slvd-measured-ei",
                    Some(p.mean_insertions.max(1.0)),
                    "measured",
                ),
                ("slvd-bound-ei", None, "bound"),
            ] {
                let b = complexity::breakdown(mode, k, m, nu, el, ei, a.c1, a.c2);
                let mut row = ComplexityRow::model(kind, &b, src);
                row.snr_db = Some(p.x);
                row.measured_mean_insertions = Some(p.mean_insertions);
                row.measured_mean_tracebacks = Some(p.mean_tracebacks);
                row.measured_max_insertions = Some(p.counts.max_insertions);
                row.trials = Some(p.counts.trials);
                rows.push(row);
            }
        }
    }
    for &wnu in &a.wava_nu {
        rows.push(ComplexityRow {
            kind: "wava",
            snr_db: None,
            mode: Termination::TailBiting.label(),
            k,
            m,
            nu: wnu,
            el: None,
            ei: None,
            ei_source: None,
            c1: None,
            c2: None,
            c_ssv: None,
            c_trace: None,
            c_list: None,
            c_total: complexity::c_wava(wnu, k, a.wava_iterations),
            normalized: None,
            measured_mean_insertions: None,
            measured_mean_tracebacks: None,
            measured_max_insertions: None,
            trials: None,
            wava_iterations: Some(a.wava_iterations),
        });
    }
    if rows.is_empty() {
        return Err(CliError::config(
            "nothing to compute: pass --el, --snr or --wava-nu",
        ));
    }
    Ok(rows)
}

fn cmd_complexity(
    sink: &Sink,
    name: &'static str,
    seed: u64,
    code: &CodeConfig,
    a: &ComplexityArgs,
) -> CliResult<()> {
    let rows = complexity_rows(code, a, seed)?;
    let record = RunRecord {
        command: name,
        version: env!("CARGO_PKG_VERSION"),
        git_rev: GIT_REV,
        seed,
        code,
        params: a,
    };
    let (mut w, _) = sink.csv(name, &record, false)?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
