use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use switched_consensus::{
    certify as certify_regime, check_consensus, disagreement, predict_consensus_value,
    random_schedule as draw_schedule, random_state, simulate as run, CertificateReport, Coupling,
    DVector, Graph, ProtocolSpec, Regime, Schedule, ScheduleParams, Topologies,
};

use crate::{CertifyArgs, ProtocolArg, ProtocolArgs, RandomScheduleArgs, ScheduleShape, SimulateArgs};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(switched_consensus::Error::from)
        .with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(switched_consensus::Error::from)
        .with_context(|| format!("writing {}", path.display()))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(switched_consensus::Error::from)
        .with_context(|| format!("creating {}", dir.display()))
}

/// Loads every `--topology id=path` in order.
fn load_topologies(specs: &[String]) -> Result<Vec<(String, Graph)>> {
    let mut out: Vec<(String, Graph)> = Vec::new();
    for spec in specs {
        let (id, path) = spec
            .split_once('=')
            .filter(|(id, path)| !id.is_empty() && !path.is_empty())
            .ok_or_else(|| input(format!("topology `{spec}` is not of the form <id>=<path>")))?;
        if out.iter().any(|(known, _)| known == id) {
            return Err(input(format!("topology id `{id}` given twice")));
        }
        let path = Path::new(path);
        let g = Graph::parse(&read(path)?).with_context(|| format!("{}", path.display()))?;
        out.push((id.to_string(), g));
    }
    Ok(out)
}

fn input(message: String) -> anyhow::Error {
    switched_consensus::Error::InvalidParameter(message).into()
}

fn parse_h(h: &str) -> Result<Option<f64>> {
    if h == "auto" {
        return Ok(None);
    }
    let v: f64 = h
        .parse()
        .map_err(|_| input(format!("--h must be a number or `auto`, got `{h}`")))?;
    Ok(Some(v))
}

fn sector(p: &ProtocolArgs) -> Option<(f64, f64)> {
    (p.protocol == ProtocolArg::Nonlinear).then_some((p.gamma1, p.gamma2))
}

fn fixed_regime(g: &Graph) -> Regime {
    if g.is_undirected() {
        Regime::UndirectedFixed
    } else {
        Regime::DirectedFixed
    }
}

pub fn certify(args: &CertifyArgs) -> Result<()> {
    let p = &args.protocol;
    let topologies = load_topologies(&p.topologies)?;
    let h = parse_h(&p.h)?;
    let graphs: Vec<Graph> = topologies.iter().map(|(_, g)| g.clone()).collect();

    let mut reports: Vec<(String, CertificateReport)> = Vec::new();
    if p.protocol == ProtocolArg::Linear {
        for (id, g) in &topologies {
            let report = certify_regime(std::slice::from_ref(g), fixed_regime(g), h)
                .with_context(|| format!("topology `{id}`"))?;
            reports.push((format!("certificate-{id}"), report));
        }
    }
    if p.protocol == ProtocolArg::Nonlinear || topologies.len() > 1 {
        let regime = Regime::infer(&graphs, sector(p))?;
        let name = match regime {
            Regime::NonlinearSwitching { .. } => "certificate-nonlinear",
            _ => "certificate-switching",
        };
        reports.push((name.to_string(), certify_regime(&graphs, regime, h)?));
    }

    if let Some(dir) = &args.out {
        create_dir(dir)?;
        for (name, report) in &reports {
            write(&dir.join(format!("{name}.txt")), &report.to_text())?;
            write(&dir.join(format!("{name}.json")), &format!("{:#}\n", report.to_json()))?;
        }
    }
    for (name, report) in &reports {
        println!("[{name}]");
        print!("{}", report.to_text());
    }
    Ok(())
}

fn schedule_params(shape: &ScheduleShape, ids: Vec<String>) -> ScheduleParams {
    ScheduleParams {
        segments: shape.segments,
        ct_duration: (shape.ct_min, shape.ct_max),
        dt_steps: (shape.dt_min, shape.dt_max),
        ct_probability: shape.ct_probability,
        topology_ids: ids,
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| input(format!("{what}: `{}` is not a number", t.trim())))
        })
        .collect()
}

fn initial_state(spec: &str, range: &str, n: usize) -> Result<DVector<f64>> {
    if let Some(seed) = spec.strip_prefix("seed:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| input(format!("--x0 seed `{seed}` is not a u64")))?;
        let bounds = parse_list(range, "--x0-range")?;
        let [lo, hi] = bounds[..] else {
            return Err(input("--x0-range takes exactly `lo,hi`".into()));
        };
        return Ok(random_state(seed, n, lo, hi)?);
    }
    let values = parse_list(spec, "--x0")?;
    if values.len() != n {
        return Err(switched_consensus::Error::DimensionMismatch {
            expected: n,
            found: values.len(),
        })
        .context("--x0");
    }
    Ok(DVector::from_vec(values))
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let p = &args.protocol;
    let loaded = load_topologies(&p.topologies)?;
    let mut topologies = Topologies::new();
    for (id, g) in &loaded {
        topologies.insert(id.clone(), g.clone())?;
    }
    let graphs = topologies.graphs();
    let n = topologies.n().ok_or_else(|| anyhow!("no topologies"))?;

    let schedule = match &args.schedule {
        Some(path) => Schedule::parse(&read(path)?).with_context(|| format!("{}", path.display()))?,
        None => {
            let ids = topologies.ids().map(str::to_string).collect();
            draw_schedule(args.seed, &schedule_params(&args.shape, ids))?
        }
    };
    let x0 = initial_state(&args.x0, &args.x0_range, n)?;

    let h = match parse_h(&p.h)? {
        Some(h) => h,
        None => {
            let used: Vec<Graph> = schedule
                .topology_ids()
                .iter()
                .map(|id| {
                    topologies
                        .get(id)
                        .cloned()
                        .ok_or_else(|| switched_consensus::Error::UnknownTopology(id.to_string()))
                })
                .collect::<Result<_, _>>()?;
            let regime = Regime::infer(&used, sector(p)).context("--h auto")?;
            certify_regime(&used, regime, None).context("--h auto")?.h
        }
    };
    let protocol = match p.protocol {
        ProtocolArg::Linear => ProtocolSpec::linear(h)?,
        ProtocolArg::Nonlinear => {
            ProtocolSpec::nonlinear(h, Coupling::from_sector(p.gamma1, p.gamma2)?)?
        }
    };

    let traj = run(&x0, &schedule, &topologies, &protocol, args.resolution)?;
    let mut verdict = check_consensus(&traj, args.tol)?;
    let all_undirected = graphs.iter().all(Graph::is_undirected);
    if p.protocol == ProtocolArg::Linear || all_undirected {
        if let Ok(prediction) = predict_consensus_value(&graphs, &x0) {
            verdict = verdict.with_prediction(&prediction);
        }
    }

    create_dir(&args.out)?;
    write(&args.out.join("trajectory.csv"), &traj.to_csv())?;
    write(&args.out.join("disagreement.csv"), &disagreement(&traj).to_csv())?;
    write(&args.out.join("schedule.txt"), &schedule.to_text())?;
    let mut text = format!("h = {}\n", switched_consensus::fmt::sig(h, 12));
    text.push_str(&verdict.to_text());
    text.push_str(&format!("schedule_sha256 = {}\n", traj.schedule_digest()));
    write(&args.out.join("verdict.txt"), &text)?;
    print!("{text}");
    Ok(())
}

pub fn random_schedule(args: &RandomScheduleArgs) -> Result<()> {
    let ids: Vec<String> = args
        .ids
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if ids.is_empty() {
        return Err(input("--ids needs at least one topology id".into()));
    }
    let schedule = draw_schedule(args.seed, &schedule_params(&args.shape, ids))?;
    match &args.out {
        Some(path) => write(path, &schedule.to_text()),
        None => {
            print!("{}", schedule.to_text());
            Ok(())
        }
    }
}
