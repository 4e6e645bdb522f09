use super::*;

#[test]
fn budget_parsing() {
    assert_eq!(parse_budgets("1..3").unwrap(), vec![Budget::Limited(1), Budget::Limited(2), Budget::Limited(3)]);
    assert_eq!(
        parse_budgets("2, 4,unlimited").unwrap(),
        vec![Budget::Limited(2), Budget::Limited(4), Budget::Unlimited]
    );
    assert!(parse_budgets("3..1").is_err());
    assert!(parse_budgets("x").is_err());
    assert!(parse_budgets("").is_err());
}

#[test]
fn states_parsing() {
    assert_eq!(parse_states("grid16").unwrap(), 16);
    assert!(parse_states("grid0").is_err());
    assert!(parse_states("16").is_err());
}

#[test]
fn clap_round_trip() {
    let cli = Cli::try_parse_from(["waylab", "sweep", "--model", "qubit-rotor", "--n", "8", "--budgets", "1..8"]).unwrap();
    let cfg = RunConfig::from_cli(cli).unwrap();
    assert_eq!(cfg.command, Command::Sweep);
    assert_eq!(cfg.budgets.len(), 8);
    assert_eq!(cfg.model.unwrap().n, Some(8));
    let cli = Cli::try_parse_from(["waylab", "audit", "--model", "lueders", "--lam-index", "-1"]).unwrap();
    assert_eq!(RunConfig::from_cli(cli).unwrap().model.unwrap().lam_index, Some(-1));
}

#[test]
fn audit_model_swap_reports_yanase() {
    let mut cfg = RunConfig::new(Command::Audit);
    cfg.model = Some(ModelDescriptor::new("swap"));
    let out = execute(&cfg).unwrap();
    assert!(!out.violation);
    let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
    assert_eq!(v["way"]["verdict"]["kind"], "hypothesis_violated");
    assert_eq!(v["way"]["verdict"]["failed"][0], "yanase");
}

#[test]
fn load_requires_exactly_one_source() {
    let cfg = RunConfig::new(Command::Audit);
    assert!(execute(&cfg).is_err());
}
