use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn crahn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crahn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header row and data rows, after checking the comment line.
fn table(text: &str) -> (String, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with("# crahn "), "{comment}");
    assert!(comment.contains(" config="), "{comment}");
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("params.conf");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn derive_prints_nine_significant_digits() {
    let out = crahn(&["derive"]);
    assert!(out.status.success());
    let (header, rows) = table(&stdout(&out));
    assert_eq!(header, "key,value");
    assert_eq!(rows.len(), 9);
    let beta_p_hat = rows.iter().find(|r| r[0] == "beta_p_hat").unwrap();
    assert_eq!(beta_p_hat[1], "1.91837333e0");
}

#[test]
fn config_file_overrides_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "# lower SU power\np_su = 0.05\n");
    let (_, base) = table(&stdout(&crahn(&["derive"])));
    let (_, lower) = table(&stdout(&crahn(&["derive", "--config", &cfg])));
    let beta = |rows: &[Vec<String>]| {
        rows.iter().find(|r| r[0] == "beta").unwrap()[1]
            .parse::<f64>()
            .unwrap()
    };
    assert!(beta(&lower) < beta(&base));
}

#[test]
fn exit_codes_follow_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "bandwidth = 5\n");
    assert_eq!(
        crahn(&["derive", "--config", &unknown]).status.code(),
        Some(2)
    );
    assert_eq!(
        crahn(&["derive", "--config", "/nonexistent/params.conf"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(crahn(&["sim", "--rounds", "0"]).status.code(), Some(2));
    assert_eq!(crahn(&["bogus"]).status.code(), Some(2));

    let hopeless = write_config(dir.path(), "eps_pr = 0.0001\n");
    assert_eq!(
        crahn(&["derive", "--config", &hopeless]).status.code(),
        Some(3)
    );
    let bent = write_config(dir.path(), "alpha = 3\n");
    assert_eq!(crahn(&["derive", "--config", &bent]).status.code(), Some(3));
    assert_eq!(
        crahn(&["plan", "--scheme", "static", "--eps-t", "0.01"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn help_states_units() {
    let out = crahn(&["--help"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("mW"));
}

#[test]
fn plan_reports_timer_at_the_target() {
    let out = crahn(&["plan", "--scheme", "mobile"]);
    assert!(out.status.success());
    let (_, rows) = table(&stdout(&out));
    let p = rows.iter().find(|r| r[0] == "p_at_t_star").unwrap()[1]
        .parse::<f64>()
        .unwrap();
    assert!((p - 0.95).abs() < 1e-3);
}

#[test]
fn ode_rows_conserve_population() {
    let out = crahn(&[
        "ode", "--scheme", "mobile", "--timer", "18", "--stride", "50",
    ]);
    assert!(out.status.success());
    let (header, rows) = table(&stdout(&out));
    assert_eq!(header, "t,S,I,R,P");
    assert_eq!(rows.len(), 37);
    for r in rows {
        let v: Vec<f64> = r.iter().map(|x| x.parse().unwrap()).collect();
        assert!((v[1] + v[2] + v[3] - 640.0).abs() < 1e-6);
    }
}

#[test]
fn sim_writes_dynamics_and_summary_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let out_s = out.to_str().unwrap();
    let args = [
        "sim", "--scheme", "mobile", "--timer", "12", "--rounds", "20", "--seed", "5", "--out",
        out_s,
    ];
    assert!(crahn(&args).status.success());
    let first = fs::read(&out).unwrap();
    let summary = fs::read_to_string(dir.path().join("run_summary.csv")).unwrap();
    let (header, rows) = table(&String::from_utf8(first.clone()).unwrap());
    assert_eq!(header, "frame,mean_S,mean_I,mean_R,se_I");
    assert_eq!(rows.len(), 13);
    let (header, rows) = table(&summary);
    assert_eq!(header, "P_T,Q_T,mean_T_D,rounds,seed");
    assert_eq!(rows[0][3], "20");
    assert_eq!(rows[0][4], "5");

    let mut serial = args.to_vec();
    serial.push("--serial");
    assert!(crahn(&serial).status.success());
    assert_eq!(fs::read(&out).unwrap(), first);
}

#[test]
fn sweep_columns_and_monotone_sim_path() {
    let out = crahn(&[
        "sweep", "--scheme", "static", "--timers", "4:20:4", "--rounds", "10", "--seed", "2",
    ]);
    assert!(out.status.success());
    let (header, rows) = table(&stdout(&out));
    assert_eq!(header, "T,P_T_ode,P_T_sim,Q_T_ode,Q_T_sim,scheme");
    assert_eq!(rows.len(), 5);
    for col in 1..=4 {
        let v: Vec<f64> = rows.iter().map(|r| r[col].parse().unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] >= w[0]), "column {col}: {v:?}");
    }
    assert!(rows.iter().all(|r| r[5] == "static"));
}

#[test]
fn figures_are_well_formed_with_few_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = crahn(&[
        "figures",
        "--rounds",
        "10",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let read = |name: &str| fs::read_to_string(dir.path().join(name)).unwrap();

    let (header, rows) = table(&read("fig4_static_dynamics.csv"));
    assert!(header.starts_with("frame,S_ode,I_ode,R_ode,P_ode"));
    assert_eq!(rows.len(), 66);
    let (_, rows) = table(&read("fig5_mobile_dynamics.csv"));
    assert_eq!(rows.len(), 19);
    let (header, rows) = table(&read("fig6_reception_probability.csv"));
    assert_eq!(header, "T,scheme,P_T_ode,P_T_sim,P_T_sim_se");
    assert_eq!(rows.len(), 26);
    let (header, rows) = table(&read("fig7_buffer_occupancy.csv"));
    assert_eq!(header, "T,scheme,Q_T_ode,Q_T_sim,Q_T_sim_se");
    assert_eq!(rows.len(), 26);
    let (_, rows) = table(&read("summary.csv"));
    assert_eq!(rows.len(), 2);
}
