use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use iedm_core::formgen::form_schema;
use iedm_core::ontology::{Namespaces, QuantityKind};
use iedm_core::rdf::{dataset_from_graph, parse_turtle_with, serialize_turtle, tbox_graph};
use iedm_core::validation::{validate_dataset_with, ValidationOptions};
use iedm_core::{load_builtin_ontology, Iri, LayerStack, MaterialTable, QuantityValue};
use iedm_datamgr::model::*;
use iedm_datamgr::{demo, http, ManualClock, Service};

#[derive(Parser)]
#[command(name = "iedm", version, about = "Irradiation experiment data manager")]
struct Cli {
    /// Directory holding records, counters and the audit log.
    #[arg(long, global = true, env = "IEDM_DATA_ROOT", default_value = "iedm-data")]
    data_root: PathBuf,
    /// Namespace IRI the `iedm:` prefix expands to.
    #[arg(long, global = true, env = "IEDM_BASE_IRI")]
    base_iri: Option<String>,
    /// Email recorded as the author of changes.
    #[arg(long, global = true, env = "IEDM_USER")]
    user: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a Turtle dataset; exits 1 when there are violations.
    Validate {
        file: PathBuf,
        #[arg(long)]
        draft: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print an experiment as Turtle.
    Export {
        experiment: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Validate a Turtle dataset and file it under the data root.
    Import {
        file: PathBuf,
        #[arg(long)]
        name: Option<String>,
    },
    /// Occupancy of a layer stack file.
    Occupancy {
        stack: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the form schema of a class as JSON.
    Formgen { class: String },
    /// Print the built-in T-Box as Turtle.
    Tbox,
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "IEDM_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
    #[command(subcommand)]
    Sample(SampleCmd),
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Create the FCC-Radmon experiment and five sample rows.
    SeedDemo,
}

#[derive(Subcommand)]
enum SampleCmd {
    List {
        #[arg(long, default_value = "")]
        query: String,
        #[arg(long)]
        experiment: Option<String>,
        #[arg(long)]
        page: Option<usize>,
        #[arg(long)]
        page_size: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    New {
        #[arg(long)]
        name: String,
        #[arg(long)]
        experiment: String,
        #[command(flatten)]
        fluence: FluenceArgs,
        #[arg(long, default_value = "")]
        note: String,
        #[command(flatten)]
        occupancy: OccupancyArgs,
    },
    Update {
        id: String,
        /// Version the change is based on.
        #[arg(long)]
        version: u64,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        note: Option<String>,
        #[arg(long)]
        fluence: Option<f64>,
        #[arg(long, requires = "fluence")]
        error: Option<f64>,
        #[command(flatten)]
        occupancy: OccupancyArgs,
    },
}

#[derive(Args)]
struct FluenceArgs {
    /// Requested fluence in particles per cm².
    #[arg(long)]
    fluence: f64,
    /// Relative error as a fraction.
    #[arg(long)]
    error: Option<f64>,
}

#[derive(Args)]
struct OccupancyArgs {
    /// Known occupancy as `R,C,I` percentages.
    #[arg(long, value_delimiter = ',', num_args = 3, conflicts_with = "stack")]
    occupancy: Option<Vec<f64>>,
    /// Layer stack file to compute the occupancy from.
    #[arg(long)]
    stack: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Category {
    PassiveStandard,
    PassiveCustom,
    Active,
}

impl From<Category> for IrradiationCategory {
    fn from(c: Category) -> Self {
        match c {
            Category::PassiveStandard => IrradiationCategory::PassiveStandardIrradiation,
            Category::PassiveCustom => IrradiationCategory::PassiveCustomIrradiation,
            Category::Active => IrradiationCategory::ActiveIrradiation,
        }
    }
}

#[derive(Subcommand)]
enum ExperimentCmd {
    List,
    New {
        #[arg(long)]
        title: String,
        #[arg(long, default_value = "iedm:CERN_IRRAD")]
        facility: Iri,
        #[arg(long, value_enum)]
        category: Category,
        #[arg(long)]
        responsible: String,
        #[arg(long)]
        operator: String,
        #[arg(long)]
        coordinator: Option<String>,
        #[arg(long)]
        manager: Option<String>,
        #[arg(long, default_value = "")]
        requirements: String,
        #[arg(long)]
        visible: bool,
    },
    Visibility {
        id: String,
        #[arg(action = clap::ArgAction::Set)]
        visible: bool,
    },
    Register {
        id: String,
        #[arg(long)]
        dut: String,
        #[arg(long, default_value = "iedm:Protons_24GeV")]
        field: Iri,
        #[arg(long)]
        start: DateTime<Utc>,
    },
    Complete {
        id: String,
        record: String,
        #[arg(long)]
        end: DateTime<Utc>,
        /// Cumulated fluence in particles per cm².
        #[arg(long)]
        fluence: Option<f64>,
        #[arg(long, requires = "fluence")]
        error: Option<f64>,
    },
}

type Failure = Box<dyn std::error::Error>;

fn namespaces(cli: &Cli) -> Namespaces {
    cli.base_iri.clone().map(Namespaces::with_iedm_base).unwrap_or_default()
}

fn user(cli: &Cli) -> Result<&str, Failure> {
    cli.user
        .as_deref()
        .ok_or_else(|| "this command records an author: pass --user or set IEDM_USER".into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn fluence(value: f64, error: Option<f64>) -> Result<QuantityValue, Failure> {
    let q = QuantityValue::in_default_unit(value, QuantityKind::Fluence)?;
    Ok(match error {
        Some(e) => q.with_relative_error(e)?,
        None => q,
    })
}

fn occupancy_inputs(svc: &Service, a: OccupancyArgs) -> Result<(Option<OccupancyTriple>, Option<LayerStack>), Failure> {
    let triple = a.occupancy.map(|v| OccupancyTriple::from_array([v[0], v[1], v[2]]));
    let stack = match a.stack {
        Some(p) => Some(LayerStack::parse(&read(&p)?, svc.materials())?),
        None => None,
    };
    Ok((triple, stack))
}

fn resolve_occupancy(svc: &Service, a: OccupancyArgs) -> Result<Option<OccupancyTriple>, Failure> {
    let (triple, stack) = occupancy_inputs(svc, a)?;
    match (triple, stack) {
        (Some(t), _) => Ok(Some(t)),
        (None, Some(s)) => Ok(Some(svc.occupancy(&s)?.occupancy)),
        (None, None) => Ok(None),
    }
}

fn print_rows(page: &Page<SampleRecord>) {
    println!("Last update\tID\tName\tCategory\tRequested fluence\tOccupancy (%)\tLast updated by");
    for s in &page.items {
        println!(
            "{}\t{}\t{}\t{}\t{:e}\t{}\t{}",
            s.last_update.format("%d/%m/%Y"),
            s.id,
            s.name,
            s.category_note,
            s.requested_fluence.value(),
            s.occupancy_report,
            s.last_updated_by
        );
    }
    println!("page {} of {} records", page.page, page.total);
}

fn json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let ns = namespaces(&cli);
    let open = || Service::open(&cli.data_root, ns.clone());
    match &cli.command {
        Command::Validate { file, draft, json: as_json } => {
            let o = load_builtin_ontology();
            let g = parse_turtle_with(&read(file)?, &ns)?;
            let (ds, warnings) = dataset_from_graph(&g, &o);
            for w in &warnings {
                eprintln!("import warning: {w}");
            }
            let report = validate_dataset_with(&ds, &o, ValidationOptions { draft: *draft });
            if *as_json {
                println!("{}", json(&report));
            } else {
                print!("{report}");
            }
            return Ok(if report.is_valid() { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Export { experiment, output } => {
            let export = open()?.export_experiment(experiment, None)?;
            for w in &export.warnings {
                eprintln!("warning {w}");
            }
            match output {
                Some(p) => fs::write(p, &export.turtle).map_err(|e| format!("{}: {e}", p.display()))?,
                None => print!("{}", export.turtle),
            }
        }
        Command::Import { file, name } => {
            let name = match name {
                Some(n) => n.clone(),
                None => file.file_stem().and_then(|s| s.to_str()).unwrap_or("import").to_string(),
            };
            let (path, warnings) = open()?.import_turtle(&name, &read(file)?, user(&cli)?)?;
            for w in &warnings {
                eprintln!("import warning: {w}");
            }
            println!("{}", path.display());
        }
        Command::Occupancy { stack, json: as_json } => {
            let table = MaterialTable::builtin();
            let stack = LayerStack::parse(&read(stack)?, &table)?;
            let t = OccupancyTriple::from_array(iedm_core::materials::occupancy_triple(&stack, &table)?);
            if *as_json {
                println!("{}", json(&t));
            } else {
                println!("{}", t.report());
            }
        }
        Command::Formgen { class } => {
            let o = load_builtin_ontology();
            let class: Iri = if class.contains(':') { class.parse()? } else { Iri::iedm(class) };
            println!("{}", json(&form_schema(&class, &o)?));
        }
        Command::Tbox => {
            print!("{}", serialize_turtle(&tbox_graph(&load_builtin_ontology(), &ns)));
        }
        Command::Serve { port, host } => {
            let svc = Arc::new(open()?);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind((host.as_str(), *port)).await?;
                eprintln!("listening on http://{}", listener.local_addr()?);
                axum::serve(listener, http::router(svc)).await
            })?;
        }
        Command::Sample(cmd) => sample(&cli, cmd, open()?)?,
        Command::Experiment(cmd) => experiment(&cli, cmd, open()?)?,
        Command::SeedDemo => {
            let clock = Arc::new(ManualClock::new(Utc::now()));
            let svc = Service::open_with_clock(&cli.data_root, ns.clone(), clock.clone())?;
            let (exp, _) = demo::seed(&svc, &clock)?;
            println!("{}", exp.id);
            print_rows(&svc.list_samples(&SampleQuery::default(), demo::RESPONSIBLE)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sample(cli: &Cli, cmd: &SampleCmd, svc: Service) -> Result<(), Failure> {
    match cmd {
        SampleCmd::List { query, experiment, page, page_size, json: as_json } => {
            let q = SampleQuery {
                query: query.clone(),
                experiment_id: experiment.clone(),
                page: *page,
                page_size: *page_size,
            };
            let page = svc.list_samples(&q, cli.user.as_deref().unwrap_or(""))?;
            if *as_json {
                println!("{}", json(&page));
            } else {
                print_rows(&page);
            }
        }
        SampleCmd::New { name, experiment, fluence: f, note, occupancy } => {
            let occupancy = resolve_occupancy(&svc, clone_occ(occupancy))?;
            let rec = svc.create_sample(
                NewSample {
                    name: name.clone(),
                    category_note: note.clone(),
                    requested_fluence: fluence(f.fluence, f.error)?,
                    experiment_id: experiment.clone(),
                    occupancy,
                    layers: None,
                },
                user(cli)?,
            )?;
            println!("{}", json(&rec));
        }
        SampleCmd::Update { id, version, name, note, fluence: f, error, occupancy } => {
            let patch = SamplePatch {
                name: name.clone(),
                category_note: note.clone(),
                requested_fluence: f.map(|v| fluence(v, *error)).transpose()?,
                occupancy: resolve_occupancy(&svc, clone_occ(occupancy))?,
                layers: None,
            };
            println!("{}", json(&svc.update_sample(id, patch, user(cli)?, *version)?));
        }
    }
    Ok(())
}

fn clone_occ(a: &OccupancyArgs) -> OccupancyArgs {
    OccupancyArgs {
        occupancy: a.occupancy.clone(),
        stack: a.stack.clone(),
    }
}

fn experiment(cli: &Cli, cmd: &ExperimentCmd, svc: Service) -> Result<(), Failure> {
    match cmd {
        ExperimentCmd::List => {
            for e in svc.list_experiments(cli.user.as_deref().unwrap_or("")) {
                println!(
                    "{}\t{}\t{}\t{}",
                    e.id,
                    e.title,
                    e.facility,
                    if e.visible { "visible" } else { "hidden" }
                );
            }
        }
        ExperimentCmd::New {
            title,
            facility,
            category,
            responsible,
            operator,
            coordinator,
            manager,
            requirements,
            visible,
        } => {
            let rec = svc.create_experiment(
                NewExperiment {
                    title: title.clone(),
                    facility: facility.clone(),
                    irradiation_category: (*category).into(),
                    technical_requirements: requirements.clone(),
                    admin: AdminInfo {
                        responsible: responsible.clone(),
                        operator: operator.clone(),
                        coordinator: coordinator.clone(),
                        manager: manager.clone(),
                    },
                    visible: *visible,
                },
                user(cli)?,
            )?;
            println!("{}", json(&rec));
        }
        ExperimentCmd::Visibility { id, visible } => {
            println!("{}", json(&svc.set_visibility(id, *visible, user(cli)?)?));
        }
        ExperimentCmd::Register { id, dut, field, start } => {
            println!("{}", json(&svc.register_dut_irradiation(id, dut, field, *start, user(cli)?)?));
        }
        ExperimentCmd::Complete { id, record, end, fluence: f, error } => {
            let q = f.map(|v| fluence(v, *error)).transpose()?;
            println!("{}", json(&svc.complete_dut_irradiation(id, record, *end, q, user(cli)?)?));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
