use std::sync::Arc;

use workbench_core::folner::{FolnerBuilder, FolnerConfig};
use workbench_core::glue::{holder_seminorm, GlueInput};
use workbench_core::report::{Format, Table};
use workbench_core::smoothing::lemma6::{dyadics_up_to, f_of};
use workbench_core::smoothing::lemma7::{SymbolicZ, ZParams};
use workbench_core::smoothing::{chart_points, PsiModel, SmoothGenerator, Which};
use workbench_core::wiener::{a_inv, path_rng, sample_brownian};

fn psi() -> Arc<PsiModel<f64>> {
    Arc::new(PsiModel::build(1 << 12, 1e-14).unwrap())
}

#[test]
fn smooth_generators_permute_chart_centres_like_pl_generators() {
    // g(x_r) = x_{f(r)} with x_r = ψ^{-p}(k) for r = k / 2^p
    let psi = psi();
    for which in [Which::G1, Which::G2] {
        let g = SmoothGenerator::new(psi.clone(), which);
        for r in dyadics_up_to(6) {
            let (_, x, _) = chart_points(&psi, &r).unwrap();
            let (_, want, _) = chart_points(&psi, &f_of(which, &r)).unwrap();
            assert!((g.eval(x) - want).abs() < 1e-12, "{which:?} at {r}");
        }
    }
}

#[test]
fn z_points_glue_into_holder_bounded_diffeomorphisms() {
    let psi = psi();
    let mut builder = FolnerBuilder::new(FolnerConfig::default());
    let z: SymbolicZ<f64> = SymbolicZ::build(ZParams::default(), &mut builder, psi).unwrap();
    let mut rng = path_rng(17, 99, 0);
    for i in 0..5u64 {
        let knots = z.realize(&z.sample(&mut rng)).unwrap();
        let pieces = (0..=knots.len()).map(|j| a_inv(&sample_brownian(64, i * 1000 + j as u64).unwrap())).collect();
        let input = GlueInput::new(knots, pieces).unwrap();
        assert!(input.knot_mismatch() < 1e-8);
        let q = input.q_glue(256);
        assert_eq!((q.values()[0], q.values()[256]), (0.0, 1.0));
        let h = holder_seminorm(&q, 0.25).unwrap();
        assert!(h.value.is_finite() && h.value > 0.0);
    }
}

#[test]
fn csv_and_json_renderings_carry_the_same_rows() {
    let mut t = Table::new("demo", &["a", "b"]);
    t.push(["1/2", "x,y"]);
    t.push(["3", ""]);
    let csv = t.render(Format::Csv).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<Vec<String>> = reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    assert_eq!(rows, t.rows());
    let json: serde_json::Value = serde_json::from_str(&t.render(Format::Json).unwrap()).unwrap();
    assert_eq!(json[0]["b"], "x,y");
    assert_eq!(json.as_array().unwrap().len(), 2);
}
