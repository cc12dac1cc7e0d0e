use std::fs;

use qhlab::plot::{emit_plot, render_plot, PanelSpec, PlotSpec};

fn spec() -> PlotSpec {
    PlotSpec {
        title: "rho".into(),
        panels: vec![PanelSpec::line("(a)", "x", &["rho_before"]), PanelSpec::line("(b)", "x", &["rho_after"])],
    }
}

#[test]
fn two_panel_plot_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("d.csv");
    let body: String = (0..50).map(|i| format!("{},{},{}\n", i as f64 * 0.1, (i as f64 * 0.1).sin().powi(2), (i as f64 * 0.3).cos().powi(2))).collect();
    fs::write(&csv, format!("x,rho_before,rho_after\n{body}")).unwrap();
    let a = render_plot(&csv, &spec()).unwrap();
    assert_eq!(a, render_plot(&csv, &spec()).unwrap());
    assert!(a.starts_with("<?xml") && a.ends_with("</svg>\n"));
    assert_eq!(a.matches("<polyline").count(), 2);
    for label in ["(a)", "(b)", "rho_before", "rho_after"] {
        assert!(a.contains(label));
    }
    let out = tmp.path().join("d.svg");
    emit_plot(&csv, &spec(), &out).unwrap();
    assert_eq!(fs::read_to_string(out).unwrap(), a);
}

#[test]
fn log_log_axes_drop_non_positive_values() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("s.csv");
    fs::write(&csv, "epsilon,delta\n1e-4,2e4\n1e-3,2e3\n1e-2,2e2\n0,5\n").unwrap();
    let svg = render_plot(&csv, &PlotSpec { title: "t".into(), panels: vec![PanelSpec::line("ll", "epsilon", &["delta"]).log_log()] }).unwrap();
    assert!(svg.contains(">1e-4<") && svg.contains(">1e4<"), "{svg}");
}

#[test]
fn missing_column_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("d.csv");
    fs::write(&csv, "x,rho_before\n0,1\n").unwrap();
    let e = render_plot(&csv, &spec()).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert!(e.to_string().contains("rho_after"));
}

#[test]
fn empty_csv_is_error() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("e.csv");
    fs::write(&csv, "x,rho_before,rho_after\n").unwrap();
    assert!(render_plot(&csv, &spec()).is_err());
    fs::write(&csv, "").unwrap();
    assert!(render_plot(&csv, &spec()).is_err());
}
