//! The pipeline stages behind each subcommand. Stages are sequential and
//! per-sample work is processed in sorted file order, so identical configs
//! and seeds give byte-identical CSVs and snapshots.

use crate::config::{ActionTag, ExperimentConfig, GroupTag};
use crate::manifest::RunManifest;
use latgauge::gaugefix::{full_gauge, landau_gauge, GaugeFixError, LandauResult};
use latgauge::lattice::{side, Coord, Rect, Scale};
use latgauge::norms::{gr_norm, q_variation, rho_norm};
use latgauge::sampler::{
    default_burnin, default_thin, run_chain, ActionKind, ActionSpec, ChainState, RunPlan,
    Sampleable,
};
use latgauge::snapshot::{read_field, read_form, write_field, write_form};
use latgauge::{AlgebraVector, AntiDevelopment, GaugeField, LieGroup, OneForm};
use std::collections::BTreeMap;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn io_err<E: std::fmt::Display>(ctx: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Io(format!("{ctx}: {e}"))
}

fn ensure_dir(p: &Path) -> Result<(), CliError> {
    fs::create_dir_all(p).map_err(io_err(&format!("creating {}", p.display())))
}

fn sorted_files(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, CliError> {
    let rd = fs::read_dir(dir)
        .map_err(|e| CliError::Io(format!("reading {}: {e} (run `sample` first?)", dir.display())))?;
    let mut out: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == ext).unwrap_or(false))
        .collect();
    out.sort();
    Ok(out)
}

fn action_spec(cfg: &ExperimentConfig) -> ActionSpec {
    let kind = match cfg.action {
        ActionTag::Wilson => ActionKind::Wilson,
        ActionTag::Villain => ActionKind::Villain,
    };
    let mut spec = ActionSpec::new(kind, cfg.n1);
    if let Some(t) = cfg.truncation {
        spec.truncation = t;
    }
    spec
}

fn run_plan(cfg: &ExperimentConfig, samples: usize) -> RunPlan {
    RunPlan {
        burnin: cfg.burnin.unwrap_or_else(|| default_burnin(cfg.n1)),
        thin: cfg.thin.unwrap_or_else(|| default_thin(cfg.n1)),
        samples,
        adapt: true,
    }
}

// ---------------------------------------------------------------- sample --

pub fn cmd_sample(cfg: &ExperimentConfig, root: &Path) -> Result<(), CliError> {
    match cfg.group {
        GroupTag::U1 => sample_group::<latgauge::U1>(cfg, root),
        GroupTag::Su2 => sample_group::<latgauge::Su2>(cfg, root),
    }
}

fn sample_group<G: Sampleable>(cfg: &ExperimentConfig, root: &Path) -> Result<(), CliError> {
    let hash = cfg.hash();
    let mut manifest = RunManifest::new("sample", &hash);
    ensure_dir(root)?;
    let dir = root.join("samples");
    ensure_dir(&dir)?;
    let spec = action_spec(cfg);
    let t0 = Instant::now();
    if cfg.samples > 0 {
        for chain in 0..cfg.chains {
            let count = (0..cfg.samples).filter(|i| i % cfg.chains as usize == chain as usize).count();
            if count == 0 {
                continue;
            }
            // Counter-based seed splitting: stream = chain index, so adding
            // chains never perturbs existing streams.
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            rng.set_stream(chain as u64);
            manifest.seeds.push((cfg.seed, chain as u64));
            // Cold start: a disordered one can land U(1) in a frozen
            // nonzero winding sector and leaves coarse modes far out.
            let mut state = ChainState::<G>::cold(cfg.n1);
            if let Some(s) = cfg.proposal_sigma {
                state.sigma = s;
            }
            let plan = run_plan(cfg, count);
            let mut failed = None;
            run_chain(&spec, &plan, &mut state, &mut rng, |i, f| {
                let name = format!("c{chain:02}_s{i:04}.snap");
                let path = dir.join(&name);
                let prov = format!("cfg={hash} chain={chain} sample={i}");
                let res = fs::File::create(&path)
                    .map_err(io_err(&format!("creating {}", path.display())))
                    .and_then(|mut fh| {
                        write_field(&mut fh, f, &prov)
                            .map_err(io_err(&format!("writing {}", path.display())))
                    });
                match res {
                    Ok(()) => manifest.add_file(root, &path),
                    Err(e) => failed = Some(e),
                }
            })
            .map_err(|e| CliError::Numeric(format!("sampler: {e}")))?;
            if let Some(e) = failed {
                return Err(e);
            }
        }
    }
    manifest.add_time("sample", t0.elapsed().as_secs_f64());
    manifest.write(root).map_err(io_err("writing manifest"))?;
    Ok(())
}

// -------------------------------------------------------------- gaugefix --

pub fn cmd_gaugefix(cfg: &ExperimentConfig, root: &Path) -> Result<(), CliError> {
    match cfg.group {
        GroupTag::U1 => gaugefix_group::<latgauge::U1>(cfg, root),
        GroupTag::Su2 => gaugefix_group::<latgauge::Su2>(cfg, root),
    }
}

fn fix_one<G: LieGroup>(
    cfg: &ExperimentConfig,
    u: &GaugeField<G>,
) -> Result<LandauResult<G>, GaugeFixError> {
    if G::SIMPLY_CONNECTED {
        full_gauge(u, cfg.n0, cfg.alpha[0])
    } else {
        // No axial stage without simple connectivity; the refinement alone
        // still applies, it just starts from log U on the coarse lattice.
        landau_gauge(u, cfg.n0)
    }
}

fn gaugefix_group<G: LieGroup>(cfg: &ExperimentConfig, root: &Path) -> Result<(), CliError> {
    let hash = cfg.hash();
    let mut manifest = RunManifest::new("gaugefix", &hash);
    let dir = root.join("gauge");
    ensure_dir(&dir)?;
    let inputs = sorted_files(&root.join("samples"), "snap")?;
    let t0 = Instant::now();
    let mut csv = String::from(
        "config_hash,file,status,scale,max_bond,max_e,max_delta,exp_residual\n",
    );
    let mut ok = 0usize;
    for path in &inputs {
        let mut fh = fs::File::open(path).map_err(io_err(&format!("opening {}", path.display())))?;
        let (u, _prov): (GaugeField<G>, String) = read_field(&mut fh)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let name = path.file_stem().unwrap().to_string_lossy().to_string();
        match fix_one(cfg, &u) {
            Ok(lr) => {
                ok += 1;
                if lr.initial_bound_violated {
                    eprintln!(
                        "note: {name}: coarse |log U| above 1/2; routine for sampled fields at coarse N0"
                    );
                }
                for d in &lr.scales {
                    writeln!(
                        csv,
                        "{hash},{name},ok,{},{},{},{},{}",
                        d.n, d.max_bond, d.max_e, d.max_delta, d.exp_residual
                    )
                    .unwrap();
                }
                let out = dir.join(format!("{name}.form"));
                let mut fh =
                    fs::File::create(&out).map_err(io_err(&format!("creating {}", out.display())))?;
                write_form(&mut fh, &lr.a, &format!("cfg={hash} from={name}"))
                    .map_err(io_err(&format!("writing {}", out.display())))?;
                manifest.add_file(root, &out);
            }
            Err(e) => {
                writeln!(csv, "{hash},{name},{e:?},,,,,").unwrap();
            }
        }
    }
    if !inputs.is_empty() && ok == 0 {
        return Err(CliError::Numeric("gauge fixing failed on every sample".into()));
    }
    let csv_path = dir.join("diagnostics.csv");
    fs::write(&csv_path, csv).map_err(io_err("writing diagnostics.csv"))?;
    manifest.add_file(root, &csv_path);
    manifest.add_time("gaugefix", t0.elapsed().as_secs_f64());
    manifest.write(root).map_err(io_err("writing manifest"))?;
    Ok(())
}

// ----------------------------------------------------------------- norms --

pub fn cmd_norms(cfg: &ExperimentConfig, root: &Path, allow_large: bool) -> Result<(), CliError> {
    if cfg.n1 > 7 && !allow_large {
        return Err(CliError::Config(format!(
            "rho scan at n1 = {} enumerates O(2^(4N)) segment pairs; pass --allow-large to proceed",
            cfg.n1
        )));
    }
    match cfg.group {
        GroupTag::U1 => norms_group::<latgauge::U1>(cfg, root),
        GroupTag::Su2 => norms_group::<latgauge::Su2>(cfg, root),
    }
}

fn norms_group<G: LieGroup>(cfg: &ExperimentConfig, root: &Path) -> Result<(), CliError> {
    let hash = cfg.hash();
    let mut manifest = RunManifest::new("norms", &hash);
    let dir = root.join("norms");
    ensure_dir(&dir)?;
    let inputs = sorted_files(&root.join("gauge"), "form")?;
    let t0 = Instant::now();
    let mut csv = String::from("config_hash,file,alpha,gr,rho,alpha_norm\n");
    for path in &inputs {
        let mut fh = fs::File::open(path).map_err(io_err(&format!("opening {}", path.display())))?;
        let (a, _prov): (OneForm<G>, String) = read_form(&mut fh)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let name = path.file_stem().unwrap().to_string_lossy().to_string();
        for &alpha in &cfg.alpha {
            let g = gr_norm(&a, alpha).value;
            let r = rho_norm(&a, alpha).value;
            writeln!(csv, "{hash},{name},{alpha},{g},{r},{}", g + r).unwrap();
        }
    }
    let csv_path = dir.join("norms.csv");
    fs::write(&csv_path, csv).map_err(io_err("writing norms.csv"))?;
    manifest.add_file(root, &csv_path);
    manifest.add_time("norms", t0.elapsed().as_secs_f64());
    manifest.write(root).map_err(io_err("writing manifest"))?;
    Ok(())
}

// --------------------------------------------------------------- scaling --

pub fn cmd_scaling(cfg: &ExperimentConfig, root: &Path) -> Result<(), CliError> {
    match cfg.group {
        GroupTag::U1 => scaling_group::<latgauge::U1>(cfg, root),
        GroupTag::Su2 => scaling_group::<latgauge::Su2>(cfg, root),
    }
}

/// Dyadic 1×k rectangles at every position and orientation of Λ_n.
fn dyadic_rects(n: Scale) -> Vec<Rect> {
    let s = side(n);
    let mut out = Vec::new();
    let mut k = 1;
    while k <= s / 2 {
        for x in 0..s {
            for y in 0..s {
                out.push(Rect::new(Coord::new(n, x, y), k, 1));
                out.push(Rect::new(Coord::new(n, x, y), 1, k));
            }
        }
        k *= 2;
    }
    out
}

struct Bucket {
    log_pow: f64,
    var_pow: f64,
    count: u64,
    skipped: u64,
}

fn scaling_group<G: LieGroup>(cfg: &ExperimentConfig, root: &Path) -> Result<(), CliError> {
    let hash = cfg.hash();
    let mut manifest = RunManifest::new("scaling", &hash);
    let dir = root.join("scaling");
    ensure_dir(&dir)?;
    let inputs = sorted_files(&root.join("samples"), "snap")?;
    let t0 = Instant::now();

    let mut buckets_csv = String::from(
        "config_hash,beta,q,alpha,n,k,area,mean_log_pow,mean_var_pow,ratio,count,skipped\n",
    );
    let mut sup_csv = String::from("config_hash,file,alpha,beta,q,sup\n");

    for &beta in &cfg.beta {
        for &q in &cfg.q {
            let mut buckets: BTreeMap<(Scale, u32), Bucket> = BTreeMap::new();
            let mut sups: Vec<(String, Vec<f64>)> = Vec::new();
            for path in &inputs {
                let mut fh =
                    fs::File::open(path).map_err(io_err(&format!("opening {}", path.display())))?;
                let (mut u, _prov): (GaugeField<G>, String) = read_field(&mut fh)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let name = path.file_stem().unwrap().to_string_lossy().to_string();
                let mut sup_terms: Vec<(f64, f64)> = Vec::new(); // (statistic, area)
                for n in (cfg.n0..=cfg.n1).rev() {
                    if u.n != n {
                        u = u.coarsen();
                    }
                    for r in dyadic_rects(n) {
                        let k = r.plaquette_count();
                        let hol = G::log(u.rect_holonomy(r)).norm();
                        let var = AntiDevelopment::of(&u, r).ok().map(|x| q_variation(&x, q).value);
                        let slot = buckets.entry((n, k)).or_insert(Bucket {
                            log_pow: 0.0,
                            var_pow: 0.0,
                            count: 0,
                            skipped: 0,
                        });
                        match var {
                            Some(v) => {
                                slot.log_pow += hol.powf(beta);
                                slot.var_pow += v.powf(beta);
                                slot.count += 1;
                                sup_terms.push((hol.powf(beta) + v.powf(beta), r.area()));
                            }
                            // The anti-development can cross the cut locus
                            // on coarse scales; such rectangles are skipped.
                            None => slot.skipped += 1,
                        }
                    }
                }
                let sup_per_alpha: Vec<f64> = cfg
                    .alpha
                    .iter()
                    .map(|&alpha| {
                        sup_terms
                            .iter()
                            .map(|&(v, area)| v / area.powf(beta * alpha / 2.0))
                            .fold(0.0, f64::max)
                    })
                    .collect();
                sups.push((name, sup_per_alpha));
            }
            for (&(n, k), b) in &buckets {
                let area = k as f64 * 0.25f64.powi(n as i32);
                let ml = b.log_pow / b.count.max(1) as f64;
                let mv = b.var_pow / b.count.max(1) as f64;
                for &alpha in &cfg.alpha {
                    let ratio = (ml + mv) / area.powf(beta * alpha / 2.0);
                    writeln!(
                        buckets_csv,
                        "{hash},{beta},{q},{alpha},{n},{k},{area},{ml},{mv},{ratio},{},{}",
                        b.count, b.skipped
                    )
                    .unwrap();
                }
            }
            for (name, sup) in &sups {
                for (&alpha, &s) in cfg.alpha.iter().zip(sup) {
                    writeln!(sup_csv, "{hash},{name},{alpha},{beta},{q},{s}").unwrap();
                }
            }
        }
    }

    let bpath = dir.join("buckets.csv");
    fs::write(&bpath, buckets_csv).map_err(io_err("writing buckets.csv"))?;
    manifest.add_file(root, &bpath);
    let spath = dir.join("sup.csv");
    fs::write(&spath, sup_csv).map_err(io_err("writing sup.csv"))?;
    manifest.add_file(root, &spath);
    manifest.add_time("scaling", t0.elapsed().as_secs_f64());
    manifest.write(root).map_err(io_err("writing manifest"))?;
    Ok(())
}

// ------------------------------------------------------------------- all --

pub fn cmd_all(cfg: &ExperimentConfig, root: &Path, allow_large: bool) -> Result<(), CliError> {
    cmd_sample(cfg, root)?;
    if cfg.samples == 0 {
        return Ok(());
    }
    cmd_gaugefix(cfg, root)?;
    cmd_norms(cfg, root, allow_large)?;
    cmd_scaling(cfg, root)
}
