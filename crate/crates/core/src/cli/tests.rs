use std::path::PathBuf;

use super::*;

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

fn config(command: Command, input: Option<PathBuf>) -> RunConfig {
    RunConfig {
        command: command.name().into(),
        input,
        input_text: None,
        output: None,
        precision: 128,
        seed: 0,
        max_lattice: DEFAULT_LATTICE_LIMIT,
        max_plucker: DEFAULT_MAX_PLUCKER,
    }
}

fn run_file(command: Command, name: &str) -> Result<Outcome> {
    execute(command, &config(command, Some(instance(name))))
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rothcheck-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn every_shipped_instance_passes() {
    let cases = [
        (Command::Height, "height.toml"),
        (Command::Distance, "distance.toml"),
        (Command::Combi, "combi.toml"),
        (Command::Index, "index.toml"),
        (Command::Kernel, "kernel_conjugates.toml"),
        (Command::Instab, "instab.toml"),
        (Command::SsCheck, "ss_check.toml"),
        (Command::Dyson2, "dyson2.toml"),
        (Command::DysonN, "dyson_n.toml"),
        (Command::Melb, "sqrt2_melb.toml"),
        (Command::Melb, "sqrt2_split_prime.toml"),
        (Command::MainThm, "main_thm.toml"),
        (Command::Plucker, "plucker.toml"),
    ];
    for (c, name) in cases {
        let out = run_file(c, name).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(out.exit_code(), 0, "{name}: {:?}", out.verdicts);
    }
}

#[test]
fn combi_values_are_exact() {
    let out = run_file(Command::Combi, "combi.toml").unwrap();
    // vol△₂(3/4) = (3/4)²/2 and μ₂(t) = t²/2 (1 − 2t/3)
    assert_eq!(out.report["vol_lower"], "9/32");
    assert_eq!(out.report["mu"], "9/64");
    assert_eq!(out.report["big_r"]["mid"], "8");
    assert_eq!(out.report["big_r"]["rad"], "0");
}

#[test]
fn index_and_distance_reports() {
    let out = run_file(Command::Index, "index.toml").unwrap();
    // ℓ = (2, 1) at the points where T_{i1}/T_{i0} is the local coordinate
    assert_eq!(out.report["index"], "3/2");
    let out = run_file(Command::Distance, "distance.toml").unwrap();
    assert_eq!(out.report["distance"]["mid"], "1/7");
    assert_eq!(out.report["place"], "7");
}

#[test]
fn melb_report_matches_the_library() {
    let out = run_file(Command::Melb, "sqrt2_melb.toml").unwrap();
    let lhs = out.report["lhs"]["approx"].as_f64().unwrap();
    let rhs = out.report["rhs"]["approx"].as_f64().unwrap();
    assert!((lhs - 2.983_324_597_673e-7).abs() < 1e-18, "{lhs}");
    assert!((rhs - 194.881_928_830_003).abs() < 1e-9, "{rhs}");
    assert_eq!(out.verdicts, vec![("effective-lower-bound".to_string(), Verdict::True)]);
}

#[test]
fn main_theorem_reports_the_pipeline() {
    let out = run_file(Command::MainThm, "main_thm.toml").unwrap();
    assert_eq!(out.report["parameters"]["check"], "parameter-pipeline");
    assert_eq!(out.verdicts.len(), 2);
    assert_eq!(out.exit_code(), 0);
}

#[test]
fn false_verdicts_give_exit_code_one() {
    let p = scratch("ss_false.toml", "q = 2\nr = [12, 1]\ndelta = \"1/5\"\nt_x = \"3/2\"\n");
    let out = execute(Command::SsCheck, &config(Command::SsCheck, Some(p))).unwrap();
    assert_eq!(out.verdicts[0].1, Verdict::False);
    assert_eq!(out.exit_code(), 1);
}

#[test]
fn semi_stability_is_a_hypothesis_of_the_comparison() {
    let body = std::fs::read_to_string(instance("main_thm.toml")).unwrap().replace("delta = \"1/5\"", "t_a = \"8/9\"\nt_x = \"3/2\"");
    let p = scratch("main_thm_unstable.toml", &body);
    let err = execute(Command::MainThm, &config(Command::MainThm, Some(p))).err().unwrap();
    assert!(matches!(err, Error::SSViolated(_)), "{err}");
}

#[test]
fn input_errors() {
    let cfg = config(Command::Height, None);
    assert!(matches!(execute(Command::Height, &cfg), Err(Error::InvalidInput(_))));
    let unknown = scratch("unknown.toml", "point = [\"1\", \"2\"]\ncolour = 3\n");
    let err = execute(Command::Height, &config(Command::Height, Some(unknown))).err().unwrap();
    assert!(err.to_string().contains("colour"), "{err}");
    let no_field = scratch("no_field.toml", "point = [[\"1\", \"0\"], [\"0\", \"1\"]]\n");
    assert!(matches!(execute(Command::Height, &config(Command::Height, Some(no_field))), Err(Error::InvalidInput(_))));
    let bad_rational = scratch("bad_rational.toml", "n = 2\nt = \"3/0\"\n");
    assert!(execute(Command::Combi, &config(Command::Combi, Some(bad_rational))).is_err());
    let malformed = scratch("malformed.toml", "n = [2\n");
    let err = execute(Command::Combi, &config(Command::Combi, Some(malformed))).err().unwrap();
    // toml reports the line of the problem
    assert!(err.to_string().contains("line"), "{err}");
}

#[test]
fn precision_must_be_at_least_32_bits() {
    let cli = Cli::try_parse_from(["rothcheck", "combi", "--precision", "16"]).unwrap();
    assert!(RunConfig::from_cli(&cli).is_err());
    let cli = Cli::try_parse_from(["rothcheck", "ss-check", "--precision", "32", "--seed", "3"]).unwrap();
    let cfg = RunConfig::from_cli(&cli).unwrap();
    assert_eq!((cfg.command.as_str(), cfg.precision, cfg.seed), ("ss-check", 32, 3));
}

#[test]
fn command_names_round_trip() {
    for c in Command::ALL {
        assert_eq!(Command::from_name(c.name()).unwrap(), c);
    }
    assert!(Command::from_name("Dyson2").is_err());
}

#[test]
fn inline_input_matches_the_file() {
    let mut cfg = config(Command::Combi, None);
    cfg.input_text = Some(std::fs::read_to_string(instance("combi.toml")).unwrap());
    let inline = execute(Command::Combi, &cfg).unwrap();
    assert_eq!(inline.report, run_file(Command::Combi, "combi.toml").unwrap().report);
}
