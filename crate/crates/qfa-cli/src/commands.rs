use crate::machines::{epsilon, members, MachineArgs};
use crate::output::{emit, report, Provenance};
use crate::{verify, Cli, CliError, Command, Engine, GenFormat, Outcome, SimArgs};
use qfa_core::builders::{negative_corpus, InterpError, InterpMode, Interpreter, Template};
use qfa_core::engines::{
    estimate, run_trajectory, solve_exact, EngineError, EstimateReport, ExactOptions,
};
use qfa_core::langkit::is_member;
use qfa_core::machine::validate_spec;
use qfa_core::par::Parallelism;
use qfa_core::Family;
use serde_json::json;
use std::fs;
use std::path::Path;

fn engine_err(e: EngineError) -> CliError {
    match e {
        EngineError::ResourceCap(m) => CliError::Cap(m),
        other => CliError::Usage(other.to_string()),
    }
}

fn interp_err(e: InterpError) -> CliError {
    match e {
        InterpError::Engine(e) => engine_err(e),
        other => CliError::Usage(other.to_string()),
    }
}

fn io_err(path: Option<&Path>) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| {
        CliError::Usage(format!(
            "{}: {e}",
            path.map_or("stdout".into(), |p| p.display().to_string())
        ))
    }
}

pub fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    let out = cli.out.as_deref();
    let stamp = !cli.no_timestamp;
    let write = |text: &str| emit(out, text).map_err(io_err(out));
    match cli.command {
        Command::Gen {
            family,
            i,
            n,
            m,
            limit,
            negative,
            per_class,
            seed,
            format,
        } => {
            let params = json!({ "family": family, "i": i, "n": n, "m": m, "limit": limit,
                "negative": negative, "per_class": per_class });
            if negative {
                let seed = seed.ok_or(CliError::Usage("--negative needs --seed".into()))?;
                let cases = negative_corpus(per_class, seed);
                let text = match format {
                    GenFormat::Lines => cases
                        .iter()
                        .map(|c| format!("{}\t{}\n", c.class, c.input))
                        .collect(),
                    GenFormat::Json => report(
                        &Provenance::new("gen", params, Some(seed), stamp),
                        json!({ "cases": cases }),
                    ),
                };
                write(&text)?;
                return Ok(Outcome::Done);
            }
            let family =
                family.ok_or(CliError::Usage("gen needs --family or --negative".into()))?;
            let i = if family.is_indexed() {
                i.ok_or(CliError::Usage(format!("{family} needs --i")))?
            } else {
                0
            };
            let strings = members(family, i, n, m, limit)?;
            let text = match format {
                GenFormat::Lines => strings.iter().map(|s| format!("{s}\n")).collect(),
                GenFormat::Json => report(
                    &Provenance::new("gen", params, None, stamp),
                    json!({ "members": strings }),
                ),
            };
            write(&text)?;
            Ok(Outcome::Done)
        }
        Command::Check { family, i, input } => {
            let verdict =
                is_member(family, i, &input).map_err(|e| CliError::Usage(e.to_string()))?;
            let params = json!({ "family": family, "i": i, "input": input });
            write(&report(
                &Provenance::new("check", params, None, stamp),
                json!({ "member": verdict }),
            ))?;
            Ok(if verdict {
                Outcome::Done
            } else {
                Outcome::Negative
            })
        }
        Command::Build { machine, validate } => {
            if let Some(path) = validate {
                let text = fs::read_to_string(&path).map_err(io_err(Some(&path)))?;
                let spec = qfa_core::MachineSpec::from_json(&text)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                let r = validate_spec(&spec);
                let params = json!({ "validate": path });
                write(&report(&Provenance::new("build", params, None, stamp), &r))?;
                return Ok(if r.pass {
                    Outcome::Done
                } else {
                    Outcome::Negative
                });
            }
            let name = machine
                .machine
                .as_deref()
                .ok_or(CliError::Usage("build needs --machine".into()))?;
            let mut spec = machine.build(name)?;
            spec.metadata.insert(
                "tool".into(),
                format!("{} {}", crate::output::TOOL, crate::output::VERSION),
            );
            spec.metadata.insert("machine".into(), name.into());
            let mut text = spec.to_json();
            text.push('\n');
            write(&text)?;
            Ok(Outcome::Done)
        }
        Command::Run {
            machine,
            input,
            seed,
            max_steps,
        } => {
            let spec = machine.load()?;
            let r = run_trajectory(&spec, &input, seed, max_steps).map_err(engine_err)?;
            let params = json!({ "machine": machine, "input": input, "max_steps": max_steps });
            write(&report(
                &Provenance::new("run", params, Some(seed), stamp),
                &r,
            ))?;
            Ok(Outcome::Done)
        }
        Command::Estimate {
            machine,
            input,
            sim,
        } => {
            let r = simulate(&machine, &input, &sim)?;
            let params = json!({ "machine": machine, "input": input, "sim": sim });
            write(&report(
                &Provenance::new("estimate", params, Some(sim.seed), stamp),
                &r,
            ))?;
            Ok(Outcome::Done)
        }
        Command::Exact {
            machine,
            input,
            config_cap,
            node_cap,
        } => {
            let spec = machine.load()?;
            let mut opts = ExactOptions::default();
            opts.config_cap = config_cap.unwrap_or(opts.config_cap);
            opts.node_cap = node_cap.unwrap_or(opts.node_cap);
            let s = solve_exact(&spec, &input, &opts).map_err(engine_err)?;
            let mut body = serde_json::to_value(&s).expect("solution serializes");
            if spec.metadata.get("builder").map(String::as_str) == Some("rw_gate") {
                body["p_exit"] = json!(s.p_accept);
            }
            let params = json!({ "machine": machine, "input": input, "config_cap": opts.config_cap,
                "node_cap": opts.node_cap });
            write(&report(
                &Provenance::new("exact", params, None, stamp),
                body,
            ))?;
            Ok(Outcome::Done)
        }
        Command::Sweep {
            machine,
            n,
            m,
            family,
            pick,
            sim,
        } => {
            let prov = Provenance::new(
                "sweep",
                json!({ "machine": machine, "n": n, "m": m, "family": family, "pick": pick, "sim": sim }),
                Some(sim.seed),
                stamp,
            );
            write(&sweep(
                &machine,
                n.as_deref(),
                m.as_deref(),
                family,
                pick,
                &sim,
                &prov,
            )?)?;
            Ok(Outcome::Done)
        }
        Command::Verify {
            suites,
            trials,
            seed,
        } => {
            let r = verify::run(&suites, trials, seed)?;
            let params = json!({ "suites": suites, "trials": trials });
            write(&report(
                &Provenance::new("verify", params, Some(seed), stamp),
                &r,
            ))?;
            Ok(if r.pass {
                Outcome::Done
            } else {
                Outcome::Negative
            })
        }
    }
}

fn template(machine: &MachineArgs) -> Result<Template, CliError> {
    match machine.machine.as_deref() {
        Some("rpal") => Ok(Template::Rpal),
        Some("pppal") => Ok(Template::Pppal),
        _ => Err(CliError::Usage(
            "--engine interp needs --machine rpal or pppal".into(),
        )),
    }
}

fn simulate(machine: &MachineArgs, input: &str, sim: &SimArgs) -> Result<EstimateReport, CliError> {
    let mode = if sim.sequential {
        Parallelism::Sequential
    } else {
        Parallelism::Parallel
    };
    match sim.engine {
        Engine::Compiled => {
            let spec = machine.load()?;
            estimate(&spec, input, sim.trials, sim.seed, sim.max_steps, mode).map_err(engine_err)
        }
        Engine::Interp => {
            let eps = epsilon(&machine.eps)?;
            let k = machine.k.unwrap_or(eps.default_k());
            let mut it = Interpreter::new(template(machine)?, machine.i as usize, eps, k)
                .map_err(interp_err)?
                .with_loop_only(machine.loop_only)
                .with_mode(if sim.stepwise {
                    InterpMode::Stepwise
                } else {
                    InterpMode::Fast
                });
            it.estimate(input, sim.trials, sim.seed, sim.max_steps, mode)
                .map_err(interp_err)
        }
    }
}

/// `2..8` (inclusive) or `7,57`.
fn points(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("bad range {s:?}"));
    let v: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if v.is_empty() {
        return Err(bad());
    }
    Ok(v)
}

fn sweep_input(
    machine: &MachineArgs,
    family: Option<Family>,
    n: Option<usize>,
    m: Option<usize>,
    pick: usize,
) -> Result<String, CliError> {
    let name = machine.machine.as_deref().unwrap_or("");
    let family = match (family, name) {
        (Some(f), _) => f,
        (None, "rw-gate") => return Ok("a".repeat(n.unwrap_or(0))),
        (None, "eq-core") => Family::Eq,
        (None, "pal-core") => Family::Pal,
        (None, "rpal") => Family::Rpal,
        (None, "pppal") => Family::Pppal,
        _ => {
            return Err(CliError::Usage(
                "sweep needs --family for this machine".into(),
            ))
        }
    };
    let i = machine.i as usize;
    members(family, i, n, m, pick + 1)?
        .into_iter()
        .nth(pick)
        .ok_or_else(|| CliError::Usage(format!("no member #{pick} of {family} at this size")))
}

fn sweep(
    machine: &MachineArgs,
    n: Option<&str>,
    m: Option<&str>,
    family: Option<Family>,
    pick: usize,
    sim: &SimArgs,
    prov: &Provenance,
) -> Result<String, CliError> {
    let grid: Vec<(Option<usize>, Option<usize>)> = match (n, m) {
        (Some(n), None) => points(n)?.into_iter().map(|x| (Some(x), None)).collect(),
        (None, Some(m)) => points(m)?.into_iter().map(|x| (None, Some(x))).collect(),
        _ => {
            return Err(CliError::Usage(
                "sweep needs exactly one of --n and --m".into(),
            ))
        }
    };
    let mut csv = prov.comment_lines();
    csv += "n,m,p_accept_hat,wilson_lo,wilson_hi,mean_steps,median_steps,cutoff_rate,seed,status\n";
    for (pn, pm) in grid {
        let row = sweep_input(machine, family, pn, pm, pick).and_then(|input| {
            let r = simulate(machine, &input, sim)?;
            Ok((input.len(), r))
        });
        let m = pm.map_or(String::new(), |x| x.to_string());
        match row {
            Ok((len, r)) => {
                let cut = r.cutoffs as f64 / r.trials.max(1) as f64;
                csv += &format!(
                    "{len},{m},{},{},{},{},{},{cut},{},ok\n",
                    r.p_hat, r.wilson_lo, r.wilson_hi, r.mean_steps, r.median_steps, sim.seed
                );
            }
            Err(CliError::Cap(msg)) => {
                csv += &format!(
                    ",{m},,,,,,,{},resource-cap: {}\n",
                    sim.seed,
                    msg.replace(',', ";")
                );
            }
            Err(e) => return Err(e),
        }
    }
    Ok(csv)
}
