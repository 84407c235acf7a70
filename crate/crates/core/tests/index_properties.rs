use normvar_core::index::{build_index, correlation, normalize_mean100, standardize, to_quarterly, Window};
use normvar_core::{Period, ShareSeries};
use normvar_oracles::{index_by_steps, pearson_textbook};
use proptest::prelude::*;

fn start() -> Period {
    Period::parse("1995-01").unwrap()
}

fn series(label: &str, vals: &[Option<f64>]) -> ShareSeries {
    ShareSeries::from_values(label, start(), vals).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Positive share values with occasional gaps, never constant.
fn share_values(len: usize) -> impl Strategy<Value = Vec<Option<f64>>> {
    prop::collection::vec(prop::option::weighted(0.85, 0.001f64..0.2), len).prop_filter("need variation", |v| {
        let d: Vec<f64> = v.iter().flatten().copied().collect();
        d.len() >= 3 && d.windows(2).any(|w| w[0] != w[1])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mean_is_pinned_and_scale_free(a in share_values(24), b in share_values(24), k in 0.01f64..1e3) {
        let (sa, sb) = (series("a", &a), series("b", &b));
        let w = Window::spanning(&[sa.clone(), sb.clone()]).unwrap();
        let idx = build_index(&[sa.clone(), sb.clone()], &w).unwrap();
        prop_assert!(rel_close(idx.window_mean(), 100.0, 1e-9));
        let scaled = build_index(&[sa.scaled(k), sb], &w).unwrap();
        for (x, y) in idx.rows.iter().zip(&scaled.rows) {
            match (x.1, y.1) {
                (Some(x), Some(y)) => prop_assert!(rel_close(x, y, 1e-9)),
                (None, None) => {}
                _ => prop_assert!(false, "definedness changed"),
            }
        }
    }

    #[test]
    fn single_series_matches_mean100(a in share_values(30)) {
        let s = series("a", &a);
        let w = Window::spanning(std::slice::from_ref(&s)).unwrap();
        let idx = build_index(std::slice::from_ref(&s), &w).unwrap();
        let direct = normalize_mean100(&s, &w).unwrap();
        for (x, y) in idx.rows.iter().zip(&direct.rows) {
            if let (Some(x), Some(y)) = (x.1, y.1) {
                prop_assert!(rel_close(x, y, 1e-9));
            }
        }
    }

    #[test]
    fn correlation_is_symmetric_and_bounded(a in share_values(20), b in share_values(20)) {
        let (sa, sb) = (series("a", &a), series("b", &b));
        if let (Ok(r1), Ok(r2)) = (correlation(&sa, &sb), correlation(&sb, &sa)) {
            prop_assert_eq!(r1, r2);
            prop_assert!(r1.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn quarterly_commutes_with_scaling(a in share_values(12), k in 0.01f64..100.0) {
        let s = series("a", &a);
        let q1 = to_quarterly(&s.scaled(k)).unwrap();
        let q2 = to_quarterly(&s).unwrap().scaled(k);
        for (x, y) in q1.rows.iter().zip(&q2.rows) {
            match (x.1, y.1) {
                (Some(x), Some(y)) => prop_assert!(rel_close(x, y, 1e-12)),
                (None, None) => {}
                _ => prop_assert!(false),
            }
        }
    }
}

#[test]
fn two_series_match_stepwise_oracle() {
    let a = vec![Some(0.01), Some(0.03), Some(0.02), None, Some(0.05), Some(0.04)];
    let b = vec![Some(0.10), None, Some(0.12), Some(0.20), Some(0.15), Some(0.11)];
    let want = index_by_steps(&[a.clone(), b.clone()]);
    let (sa, sb) = (series("a", &a), series("b", &b));
    let w = Window::spanning(&[sa.clone(), sb.clone()]).unwrap();
    let got = build_index(&[sa, sb], &w).unwrap();
    assert_eq!(got.sources, vec!["a".to_string(), "b".to_string()]);
    for (g, w) in got.rows.iter().zip(&want) {
        assert!(rel_close(g.1.unwrap(), w.unwrap(), 1e-12), "{g:?} vs {w:?}");
    }
}

#[test]
fn standardize_hand_example() {
    let s = series("s", &[Some(0.0), Some(0.1), Some(0.2)]);
    let w = Window::spanning(std::slice::from_ref(&s)).unwrap();
    let out = standardize(&s, &w).unwrap();
    let v: Vec<f64> = out.rows.iter().map(|r| r.1.unwrap()).collect();
    assert!((v[1] - 1.0).abs() < 1e-12 && (v[2] - 2.0).abs() < 1e-12);
}

#[test]
fn index_window_subset() {
    // Normalization over 1995-01..1995-06 only; later months ride along.
    let vals: Vec<Option<f64>> = (0..12).map(|i| Some(0.01 * (1.0 + (i as f64 * 0.7).sin().abs()))).collect();
    let s = series("s", &vals);
    let w = Window::new(start(), start().offset(5));
    let idx = build_index(std::slice::from_ref(&s), &w).unwrap();
    let in_window: Vec<f64> = idx.rows[..6].iter().map(|r| r.1.unwrap()).collect();
    assert!(rel_close(in_window.iter().sum::<f64>() / 6.0, 100.0, 1e-12));
    assert_eq!(idx.rows.len(), 12);
    assert_eq!(idx.window, w);
}

#[test]
fn correlation_matches_textbook_formula() {
    let xs: Vec<f64> = (0..40).map(|i| ((i * 37 % 11) as f64 * 0.13).sin() + 0.02 * i as f64).collect();
    let ys: Vec<f64> = (0..40).map(|i| ((i * 17 % 7) as f64 * 0.29).cos() - 0.01 * i as f64).collect();
    let a = series("a", &xs.iter().map(|&x| Some(x)).collect::<Vec<_>>());
    let b = series("b", &ys.iter().map(|&y| Some(y)).collect::<Vec<_>>());
    let r = correlation(&a, &b).unwrap();
    assert!((r - pearson_textbook(&xs, &ys)).abs() < 1e-12);
}
