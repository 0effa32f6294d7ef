use husimi_harness::{
    fit_slope, read_records, summary_csv, write_records, RecordSink, SweepRecord,
};
use husimi_phasespace::{oscillatory_integral, KinkProfile};

fn sweep(points: &[(f64, f64)], observable: &str) -> Vec<SweepRecord> {
    let mut out = Vec::new();
    for (i, &(h, y)) in points.iter().enumerate() {
        let mut sink = RecordSink::new(format!("r{i}"), h, 1);
        sink.report(observable, y, 0.0);
        out.extend(sink.records);
    }
    out
}

#[test]
fn slope_of_a_square_is_two() {
    let pts: Vec<(f64, f64)> = [1.0, 0.5, 0.25, 0.125]
        .iter()
        .map(|&h| (h, h * h))
        .collect();
    let (slope, r2) = fit_slope(&sweep(&pts, "y"), "hbar", "y").unwrap();
    assert!((slope - 2.0).abs() < 1e-9, "{slope}");
    assert!((r2 - 1.0).abs() < 1e-12);
}

#[test]
fn slope_of_a_constant_is_zero() {
    let pts: Vec<(f64, f64)> = [1.0, 0.5, 0.25].iter().map(|&h| (h, 3.0)).collect();
    let (slope, _) = fit_slope(&sweep(&pts, "y"), "hbar", "y").unwrap();
    assert!(slope.abs() < 1e-9, "{slope}");
}

#[test]
fn fit_refuses_non_positive_values_and_names_runs() {
    let pts = [(1.0, 1.0), (0.5, 0.0), (0.25, -1.0)];
    let err = fit_slope(&sweep(&pts, "y"), "hbar", "y")
        .unwrap_err()
        .to_string();
    assert!(
        err.contains("r1") && err.contains("r2") && !err.contains("r0"),
        "{err}"
    );
}

#[test]
fn fit_needs_three_points() {
    let pts = [(1.0, 1.0), (0.5, 0.25)];
    assert!(fit_slope(&sweep(&pts, "y"), "hbar", "y").is_err());
    assert!(fit_slope(&sweep(&pts, "y"), "hbar", "missing").is_err());
}

#[test]
fn slope_between_two_observables() {
    let mut recs = Vec::new();
    for (i, x) in [2.0f64, 4.0, 8.0].into_iter().enumerate() {
        let mut sink = RecordSink::new(format!("r{i}"), 1.0, 1);
        sink.report("a", x, 0.0);
        sink.report("b", x.powi(3), 0.0);
        recs.extend(sink.records);
    }
    let (slope, _) = fit_slope(&recs, "a", "b").unwrap();
    assert!((slope - 3.0).abs() < 1e-9);
}

#[test]
fn oscillation_records_recover_the_shell_rate() {
    // Kink of order 2 on the shell |x| = hbar^0.75 decays like hbar^0.5.
    let phi = KinkProfile::new(2);
    let pts: Vec<(f64, f64)> = (3..=10)
        .map(|k| {
            let h = 2f64.powi(-k);
            let r = h.powf(0.75);
            let v = oscillatory_integral(&phi, r, h)
                .norm()
                .max(oscillatory_integral(&phi, -r, h).norm());
            (h, v)
        })
        .collect();
    let (slope, _) = fit_slope(&sweep(&pts, "oscillation"), "hbar", "oscillation").unwrap();
    assert!((slope - 0.5).abs() < 0.05, "{slope}");
}

#[test]
fn checks_and_reports() {
    let mut sink = RecordSink::new("x", 0.5, 2);
    assert!(sink.check("ok", 1e-12, 1e-10, 1.0));
    assert!(!sink.check("bad", 1e-8, 1e-10, 1.0));
    sink.report("info", 3.0, 1.0);
    assert_eq!(sink.failures().len(), 1);
    assert_eq!(sink.failures()[0].observable, "bad");
    assert!(sink.records[2].tolerance.is_none() && !sink.records[2].is_hard());
    // The boundary is inclusive.
    assert!(sink.check("edge", 1e-10, 1e-10, 1.0));
}

#[test]
fn records_survive_disk() {
    let dir = tempfile::tempdir().unwrap();
    let mut sink = RecordSink::new("x", 0.5, 2);
    sink.check("a", 0.1 + 0.2, 1.0, 0.3);
    sink.report("b", std::f64::consts::PI, 0.3);
    write_records(&sink.records, dir.path()).unwrap();
    assert_eq!(read_records(dir.path()).unwrap(), sink.records);
    let csv = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(csv, summary_csv(&sink.records));
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("run,observable,value,hbar,n,t,tolerance,passed\n"));
}
