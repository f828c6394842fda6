use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use relay_de::channel::{sigma_sym, symmetric_information_rate};
use relay_de::de::{de_run, DeConfig};
use relay_de::oracle::{compare_ml_bp, monte_carlo_ber, McConfig};
use relay_de::threshold::{
    bp_threshold, default_bracket, extrapolate_threshold, write_summary_csv, Extrapolation, SummaryRow,
    ThresholdResult,
};
use relay_de::{ChannelParams, Ensemble, QuadratureConfig, RegularEnsemble, ScProtograph};

use crate::{Cli, Command, DeArgs, EnsembleArgs, Grid};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Sir(a) => sir(cli, a),
        Command::DeTrace(a) => de_trace(cli, a),
        Command::Threshold(a) => threshold(cli, a),
        Command::Simulate(a) => simulate(cli, a),
        Command::Describe(a) => describe(a),
    }
}

fn sequential(cli: &Cli) -> bool {
    cli.threads == Some(1)
}

/// Metadata echoed at the top of every output file.
fn metadata(cli: &Cli) -> Vec<(String, String)> {
    let command: Vec<String> = std::iter::once("relay-de".to_string())
        .chain(std::env::args().skip(1))
        .collect();
    vec![
        ("tool".into(), format!("relay-de {}", env!("CARGO_PKG_VERSION"))),
        ("command".into(), command.join(" ")),
        ("seed".into(), cli.seed.to_string()),
        (
            "threads".into(),
            cli.threads.map_or("default".into(), |t| t.to_string()),
        ),
    ]
}

fn write_meta<W: Write + ?Sized>(out: &mut W, meta: &[(String, String)]) -> io::Result<()> {
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn ensemble(a: &EnsembleArgs) -> Result<Ensemble> {
    Ok(match a.chain {
        Some(l) => ScProtograph::new(a.d_l, a.d_r, l)?.into(),
        None => RegularEnsemble::new_relaxed(a.d_l, a.d_r)?.into(),
    })
}

fn de_config(cli: &Cli, a: &DeArgs) -> Result<DeConfig> {
    let mut cfg = if a.paper_fidelity {
        DeConfig::paper_fidelity()
    } else {
        DeConfig::desk()
    };
    if let Some(n) = a.population {
        cfg.population_size = n;
        cfg.ber_samples = n;
    }
    if let Some(t) = a.iterations {
        cfg.max_iterations = t;
    }
    if let Some(b) = a.ber_samples {
        cfg.ber_samples = b;
    }
    if let Some(k) = a.zero_streak {
        cfg.zero_streak = k;
    }
    cfg.seed = cli.seed;
    cfg.parallel = !sequential(cli);
    cfg.validate()?;
    Ok(cfg)
}

fn grid_points(g: Grid) -> Vec<f64> {
    let count = ((g.stop - g.start) / g.step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| g.start + i as f64 * g.step).collect()
}

fn sir(cli: &Cli, a: &crate::SirArgs) -> Result<()> {
    let q = QuadratureConfig::default();
    let meta = metadata(cli);
    if let Some(rate) = a.rate {
        let s = sigma_sym(rate, &q, 1e-9)?;
        return with_output(a.out.as_deref(), |w| {
            write_meta(w, &meta)?;
            writeln!(w, "rate,sigma_sym")?;
            writeln!(w, "{rate},{s}")
        });
    }
    let mut sigmas = a.sigma.clone();
    if let Some(g) = a.grid {
        sigmas.extend(grid_points(g));
    }
    if sigmas.is_empty() {
        bail!("give --rate, --sigma or --grid");
    }
    let rows = sigmas
        .iter()
        .map(|&s| Ok((s, symmetric_information_rate(&ChannelParams::new(s)?, &q)?)))
        .collect::<Result<Vec<_>>>()?;
    with_output(a.out.as_deref(), |w| {
        write_meta(w, &meta)?;
        writeln!(w, "sigma,c_sym")?;
        for (s, c) in &rows {
            writeln!(w, "{s},{c}")?;
        }
        Ok(())
    })
}

fn de_trace(cli: &Cli, a: &crate::DeTraceArgs) -> Result<()> {
    let e = ensemble(&a.ensemble)?;
    let cfg = de_config(cli, &a.de)?;
    let trace = de_run(&e, &ChannelParams::new(a.sigma)?, &cfg)?;
    let meta = metadata(cli);
    with_output(a.out.as_deref(), |w| trace.write_csv(w, &meta))
}

#[derive(Serialize)]
struct ThresholdReport {
    metadata: Vec<(String, String)>,
    results: Vec<ThresholdResult>,
    summary: Vec<SummaryRow>,
    extrapolation: Option<Extrapolation>,
}

fn threshold(cli: &Cli, a: &crate::ThresholdArgs) -> Result<()> {
    if !(a.bracket.is_empty() || a.bracket.len() == 2) {
        bail!("--bracket takes exactly two values, lo,hi");
    }
    let cfg = de_config(cli, &a.de)?;
    let ensembles: Vec<Ensemble> = if a.sweep.is_empty() {
        vec![ensemble(&a.ensemble)?]
    } else {
        a.sweep
            .iter()
            .map(|&l| Ok(ScProtograph::new(a.ensemble.d_l, a.ensemble.d_r, l)?.into()))
            .collect::<Result<_>>()?
    };
    let search = |e: &Ensemble| -> Result<ThresholdResult> {
        let bracket = match a.bracket[..] {
            [lo, hi] => (lo, hi),
            _ => default_bracket(e),
        };
        bp_threshold(e, &cfg, bracket, a.tol).with_context(|| format!("threshold search for {}", e.label()))
    };
    let results: Vec<ThresholdResult> = if sequential(cli) {
        ensembles.iter().map(search).collect::<Result<_>>()?
    } else {
        ensembles.par_iter().map(search).collect::<Result<_>>()?
    };
    let summary = ensembles
        .iter()
        .zip(&results)
        .map(|(e, r)| SummaryRow::new(e, r))
        .collect::<relay_de::Result<Vec<_>>>()?;
    let extrapolation = if a.extrapolate {
        let points: Vec<(usize, f64)> = a.sweep.iter().copied().zip(results.iter().map(|r| r.estimate)).collect();
        Some(extrapolate_threshold(&points)?)
    } else {
        None
    };
    let meta = metadata(cli);
    if let Some(p) = &a.summary_csv {
        with_output(Some(p), |w| {
            write_meta(w, &meta)?;
            write_summary_csv(w, &summary)
        })?;
    }
    let report = ThresholdReport {
        metadata: meta,
        results,
        summary,
        extrapolation,
    };
    with_output(a.out.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)
    })
}

fn simulate(cli: &Cli, a: &crate::SimulateArgs) -> Result<()> {
    let cfg = McConfig {
        d_l: a.d_l,
        d_r: a.d_r,
        n: a.n,
        trials: a.trials,
        max_iters: a.iters,
        seed: cli.seed,
        fresh_graph: !(a.same_graph || a.ml),
        parallel: !sequential(cli),
    };
    let ch = ChannelParams::new(a.sigma)?;
    let meta = metadata(cli);
    if a.ml {
        let r = compare_ml_bp(&cfg, &ch)?;
        return with_output(a.out.as_deref(), |w| {
            write_meta(w, &meta)?;
            writeln!(
                w,
                "# n={} dimension={} sigma={} trials={} parallel_edges={}",
                r.n, r.dimension, r.sigma, r.trials, r.parallel_edges
            )?;
            writeln!(w, "decoder,fer,std_err")?;
            writeln!(w, "bp,{},{}", r.bp_fer, r.bp_std_err)?;
            writeln!(w, "ml,{},{}", r.ml_fer, r.ml_std_err)
        });
    }
    let r = monte_carlo_ber(&cfg, &ch)?;
    if let Some(p) = &a.trials_csv {
        with_output(Some(p), |w| {
            write_meta(w, &meta)?;
            r.write_trials_csv(w)
        })?;
    }
    with_output(a.out.as_deref(), |w| r.write_csv(w, &meta))
}

fn describe(a: &crate::DescribeArgs) -> Result<()> {
    let e = ensemble(&a.ensemble)?;
    with_output(a.out.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &e.describe())?;
        writeln!(w)
    })
}
