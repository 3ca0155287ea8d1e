//! Command-line front end of the `eedesign` binary.
//!
//! Every subcommand loads a scenario (the reference scenario when no
//! `--config` is given), applies the command-line overrides, revalidates,
//! prints a short summary on stdout and writes its CSV tables into `--out`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use eedesign_core::design::{alternating_optimize, ee_surface, exhaustive_search, Stage};
use eedesign_core::ee::optimal_power;
use eedesign_core::DesignPoint;

use crate::config::{parse_config, ScenarioConfig};
use crate::error::{Result, SimError};
use crate::mc::{LinkSimulator, McEstimate, PrecoderSpec, Scheme};
use crate::output::{
    float, Table, OPTIMUM_COLUMNS, SIMULATE_COLUMNS, SURFACE_COLUMNS, SWEEP_COLUMNS, TRAJECTORY_COLUMNS,
};
use crate::sweep::{antenna_sweep, is_analytic, SweepRow};

#[derive(Debug, Parser)]
#[command(name = "eedesign", version, about = "Energy-efficient multi-user MIMO design")]
pub struct Cli {
    /// Scenario file; omitted keys take reference values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for the CSV tables (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Overrides `[mc] seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides `[mc] trials`.
    #[arg(long, global = true)]
    pub trials: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Global optimum by exhaustive search and by alternating optimisation.
    Optimize(RangeArgs),
    /// EE of every (M, K) grid point at its best power.
    Surface {
        #[command(flatten)]
        range: RangeArgs,
        /// Precoder: zf, rzf, mrt, with `-est` for estimated CSI.
        #[arg(long, default_value = "zf")]
        scheme: PrecoderSpec,
    },
    /// EE-maximising transmit power versus the number of antennas.
    PowerScaling(SweepArgs),
    /// Maximal EE and its spectral efficiency versus the number of antennas.
    EeVsAntennas(SweepArgs),
    /// Raw Monte Carlo estimates at one (M, K).
    Simulate {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        k: u32,
        /// Normalised power; optimised per scheme when omitted.
        #[arg(long)]
        rho: Option<f64>,
        /// Comma-separated precoders; defaults to `[mc] schemes`.
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<PrecoderSpec>>,
    },
}

/// Overrides of the `[search]` grid.
#[derive(Debug, Clone, Default, Args)]
pub struct RangeArgs {
    #[arg(long)]
    pub m_min: Option<u32>,
    #[arg(long)]
    pub m_max: Option<u32>,
    #[arg(long)]
    pub k_min: Option<u32>,
    #[arg(long)]
    pub k_max: Option<u32>,
    /// Upper limit on rho; optima above it are clipped with a warning.
    #[arg(long)]
    pub rho_cap: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// Comma-separated antenna counts; defaults to `[search] antennas`.
    #[arg(long, value_delimiter = ',')]
    pub antennas: Option<Vec<u32>>,
    /// Comma-separated precoders; defaults to `[mc] schemes`.
    #[arg(long, value_delimiter = ',')]
    pub schemes: Option<Vec<PrecoderSpec>>,
}

/// The line written to stderr when a command fails.
pub fn error_line(err: &SimError) -> String {
    format!("eedesign-error: code={} kind={} message={:?}", err.exit_code(), err.kind(), err.to_string())
}

/// Loads the scenario and applies the global overrides.
pub fn load_scenario(cli: &Cli) -> Result<ScenarioConfig> {
    let mut config = match &cli.config {
        Some(path) => parse_config(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.mc.config.seed = seed;
    }
    if let Some(trials) = cli.trials {
        config.mc.config.trials = trials;
    }
    if let Command::Optimize(range) | Command::Surface { range, .. } = &cli.command {
        let s = &mut config.search;
        s.m_min = range.m_min.unwrap_or(s.m_min);
        s.m_max = range.m_max.unwrap_or(s.m_max);
        s.k_min = range.k_min.unwrap_or(s.k_min);
        s.k_max = range.k_max.or(s.k_max);
        s.rho_cap = range.rho_cap.or(s.rho_cap);
    }
    if let Command::PowerScaling(args) | Command::EeVsAntennas(args) = &cli.command {
        if let Some(antennas) = &args.antennas {
            config.search.antennas = antennas.clone();
        }
        if let Some(schemes) = &args.schemes {
            config.mc.schemes = schemes.iter().map(|&s| config.mc.configure(s)).collect();
        }
    }
    if let Command::Simulate { schemes: Some(schemes), .. } = &cli.command {
        config.mc.schemes = schemes.iter().map(|&s| config.mc.configure(s)).collect();
    }
    config.validate()?;
    Ok(config)
}

/// Runs the parsed command line; the summary goes to `out`, warnings to
/// `warn`.
pub fn run(cli: &Cli, out: &mut dyn Write, warn: &mut dyn Write) -> Result<()> {
    let config = load_scenario(cli)?;
    std::fs::create_dir_all(&cli.out).map_err(|source| SimError::Io { path: cli.out.clone(), source })?;
    let mut ctx = Context { config: &config, dir: &cli.out, out, warn };
    match &cli.command {
        Command::Optimize(_) => ctx.optimize(),
        Command::Surface { scheme, .. } => ctx.surface(config.mc.configure(*scheme)),
        Command::PowerScaling(_) => ctx.sweep("power-scaling", "power_scaling.csv"),
        Command::EeVsAntennas(_) => ctx.sweep("ee-vs-antennas", "ee_vs_antennas.csv"),
        Command::Simulate { m, k, rho, .. } => ctx.simulate(*m, *k, *rho),
    }
}

struct Context<'a> {
    config: &'a ScenarioConfig,
    dir: &'a Path,
    out: &'a mut dyn Write,
    warn: &'a mut dyn Write,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> SimError + '_ {
    move |source| SimError::Io { path: path.to_path_buf(), source }
}

fn stage_name(stage: Stage) -> &'static str {
    match stage {
        Stage::Initial => "initial",
        Stage::Users => "users",
        Stage::Antennas => "antennas",
        Stage::Power => "power",
    }
}

impl Context<'_> {
    fn say(&mut self, line: String) -> Result<()> {
        writeln!(self.out, "{line}").map_err(io(Path::new("<stdout>")))
    }

    fn warning(&mut self, line: String) -> Result<()> {
        writeln!(self.warn, "eedesign-warning: {line}").map_err(io(Path::new("<stderr>")))
    }

    fn write(&mut self, table: &Table, name: &str) -> Result<()> {
        let path = self.dir.join(name);
        table.write(&path)?;
        self.say(format!("wrote {}", path.display()))
    }

    fn base_table(&self, kind: &'static str, columns: &'static [&'static str]) -> Table {
        let c = self.config;
        Table::new(kind, columns).meta("T", c.coherence_block()).meta("a_lambda", float(c.a_lambda))
    }

    fn mc_table(&self, kind: &'static str, columns: &'static [&'static str]) -> Table {
        let mc = &self.config.mc;
        let pilot = match mc.pilot_energy {
            crate::mc::PilotEnergy::MatchDownlink => "match-downlink".to_string(),
            crate::mc::PilotEnergy::PerSymbol(e) => float(e),
        };
        self.base_table(kind, columns)
            .meta("seed", mc.config.seed)
            .meta("trials", mc.config.trials)
            .meta("resample_users", mc.config.resample_users)
            .meta("pilot_energy", pilot)
    }

    fn warn_if_clipped(&mut self, point: &DesignPoint) -> Result<()> {
        let c = self.config;
        if let Some(cap) = c.search.rho_cap {
            if point.m > point.k && optimal_power(point.m, point.k, &c.coefficients, c.a_lambda)? > cap {
                self.warning(format!("rho clipped to rho_cap = {cap} at M={} K={}", point.m, point.k))?;
            }
        }
        Ok(())
    }

    fn optimize(&mut self) -> Result<()> {
        let c = self.config;
        let (coeffs, a, t) = (&c.coefficients, c.a_lambda, c.coherence_block());
        let best = exhaustive_search(&c.search_space(), coeffs, a)?;
        self.warn_if_clipped(&best)?;
        if c.search.rho_cap.is_some() {
            self.warning("alternating optimisation does not apply rho_cap".into())?;
        }
        let (m0, k0, rho0) = c.search.init;
        let trace = alternating_optimize(m0, k0, rho0, coeffs, a, c.search.max_iter)?;
        let alt = trace.last();

        self.say(format!(
            "M={} K={} rho={} ee={} bit/J ({} Mbit/J)",
            best.m,
            best.k,
            best.rho,
            best.ee,
            best.ee / 1e6
        ))?;
        self.say(format!(
            "alternating: iterations={} converged={} M={} K={} rho={} ee={} bit/J",
            trace.iteration_count, trace.converged, alt.m, alt.k, alt.rho, alt.ee
        ))?;

        let mut optimum = self.base_table("optimum", OPTIMUM_COLUMNS);
        for (method, p, iterations) in [("exhaustive", best, 0), ("alternating", alt, trace.iteration_count)] {
            let tx = p.tx_energy(a);
            optimum.push(vec![
                method.into(),
                p.m.to_string(),
                p.k.to_string(),
                float(p.rho),
                float(p.ee),
                float(p.ee / 1e6),
                float(p.sum_rate(t)),
                float(tx),
                float(coeffs.total_power(p.m, p.k, tx)?),
                iterations.to_string(),
            ]);
        }

        let mut trajectory = self.base_table("trajectory", TRAJECTORY_COLUMNS);
        let mut iteration = 0u32;
        for (stage, p) in &trace.steps {
            if *stage == Stage::Users {
                iteration += 1;
            }
            self.say(format!(
                "iteration {iteration} {}: M={} K={} rho={} ee={}",
                stage_name(*stage),
                p.m,
                p.k,
                p.rho,
                p.ee
            ))?;
            trajectory.push(vec![
                iteration.to_string(),
                stage_name(*stage).into(),
                p.m.to_string(),
                p.k.to_string(),
                float(p.rho),
                float(p.ee),
                float(p.ee / 1e6),
            ]);
        }
        self.write(&optimum, "optimum.csv")?;
        self.write(&trajectory, "trajectory.csv")
    }

    fn surface(&mut self, spec: PrecoderSpec) -> Result<()> {
        let c = self.config;
        let space = c.search_space();
        space.validate(&c.coefficients)?;
        let mut table = if is_analytic(&spec) {
            self.base_table("surface", SURFACE_COLUMNS)
        } else {
            self.mc_table("surface", SURFACE_COLUMNS)
        }
        .meta("scheme", spec.label());
        let mut best: Option<(u32, u32, f64)> = None;
        let mut clipped = 0usize;

        let mut push = |table: &mut Table, m: u32, k: u32, rho: f64, ee: f64, sum_rate: f64, tx: f64, trials: u32| {
            if best.map_or(true, |b| ee > b.2) {
                best = Some((m, k, ee));
            }
            table.push(vec![
                spec.scheme.name().into(),
                spec.csi.name().into(),
                m.to_string(),
                k.to_string(),
                float(rho),
                float(ee),
                float(ee / 1e6),
                float(sum_rate),
                float(tx),
                trials.to_string(),
            ]);
        };

        if is_analytic(&spec) {
            for p in ee_surface(&space, &c.coefficients, c.a_lambda)? {
                if let Some(cap) = space.rho_cap {
                    if p.m > p.k && p.rho >= cap && optimal_power(p.m, p.k, &c.coefficients, c.a_lambda)? > cap {
                        clipped += 1;
                    }
                }
                push(&mut table, p.m, p.k, p.rho, p.ee, p.sum_rate(c.coherence_block()), p.tx_energy(c.a_lambda), 0);
            }
        } else {
            let coeffs = c.circuit.for_scheme(spec.scheme);
            let trials = c.mc.config.trials;
            for m in space.antennas.clone() {
                for k in *space.users.start()..=m.min(*space.users.end()) {
                    if spec.scheme == Scheme::Zf && m == k {
                        push(&mut table, m, k, 0.0, 0.0, 0.0, 0.0, trials);
                        continue;
                    }
                    let sim = LinkSimulator::new(m, k, c.coherence_block(), spec, &c.propagation, c.mc.config)?;
                    let search = sim.optimize_rho(coeffs)?;
                    let (rho, est) = match space.rho_cap {
                        Some(cap) if search.rho > cap => {
                            clipped += 1;
                            (cap, sim.estimate(cap)?)
                        }
                        _ => (search.rho, search.estimate),
                    };
                    let ee = est.ee(m, k, coeffs)?;
                    push(&mut table, m, k, rho, ee, est.sum_rate(k), est.tx_energy, trials);
                }
            }
        }
        if clipped > 0 {
            self.warning(format!("rho clipped to rho_cap at {clipped} grid points"))?;
        }
        if let Some((m, k, ee)) = best {
            self.say(format!("{}: peak M={m} K={k} ee={ee} bit/J", spec.label()))?;
        }
        self.write(&table, &format!("surface_{}.csv", spec.label()))
    }

    fn sweep(&mut self, kind: &'static str, name: &str) -> Result<()> {
        let c = self.config;
        let rows = antenna_sweep(&c.search.antennas, &c.mc.schemes, &c.circuit, &c.propagation, c.mc.config)?;
        let mut table = self.mc_table(kind, SWEEP_COLUMNS);
        for row in &rows {
            self.say(sweep_line(row))?;
            table.push(vec![
                row.spec.scheme.name().into(),
                row.spec.csi.name().into(),
                row.m.to_string(),
                row.k.to_string(),
                float(row.rho),
                float(row.tx_energy),
                float(row.tx_energy / c.hardware.symbol_time_s),
                float(row.ee),
                float(row.ee / 1e6),
                float(row.sum_rate),
                row.trials.to_string(),
                row.flat.to_string(),
            ]);
            if row.flat {
                self.warning(format!("{} at M={}: EE is flat in rho within Monte Carlo noise", row.spec, row.m))?;
            }
        }
        self.write(&table, name)
    }

    fn simulate(&mut self, m: u32, k: u32, rho: Option<f64>) -> Result<()> {
        let c = self.config;
        let mut table = self.mc_table("simulate", SIMULATE_COLUMNS);
        for &spec in &c.mc.schemes {
            let coeffs = c.circuit.for_scheme(spec.scheme);
            let sim = LinkSimulator::new(m, k, c.coherence_block(), spec, &c.propagation, c.mc.config)?;
            let (rho, est): (f64, McEstimate) = match rho {
                Some(rho) => (rho, sim.estimate(rho)?),
                None => {
                    let search = sim.optimize_rho(coeffs)?;
                    (search.rho, search.estimate)
                }
            };
            let ee = est.ee(m, k, coeffs)?;
            self.say(format!(
                "{spec}: M={m} K={k} rho={rho} rate_per_ue={} ee={ee} bit/J (+-{:.2}%)",
                est.rate_per_ue,
                100.0 * est.relative_noise()
            ))?;
            table.push(vec![
                spec.scheme.name().into(),
                spec.csi.name().into(),
                m.to_string(),
                k.to_string(),
                float(rho),
                float(est.rate_per_ue),
                float(est.sum_rate(k)),
                float(est.tx_energy),
                float(est.total_power(m, k, coeffs)?),
                float(ee),
                est.trials.to_string(),
                c.mc.config.seed.to_string(),
            ]);
        }
        self.write(&table, "simulate.csv")
    }
}

fn sweep_line(row: &SweepRow) -> String {
    format!(
        "{}: M={} K={} rho={} tx_energy={} ee={} bit/J sum_rate={} bit/c.u.",
        row.spec, row.m, row.k, row.rho, row.tx_energy, row.ee, row.sum_rate
    )
}
