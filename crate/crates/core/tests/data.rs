use std::path::PathBuf;

use implied_svm::data::*;

fn german_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/german.data-numeric")
}

#[test]
fn german_file_shape_and_labels() {
    let ds = load_csv(german_path(), 24, "1").unwrap();
    assert_eq!((ds.len(), ds.dim()), (1000, 24));
    assert_eq!(ds.class_counts(), (700, 300));
    assert_eq!(ds.ids()[..3], [0, 1, 2]);
    assert_eq!(ds.label(0), Label::Positive);
    assert_eq!(ds.label(1), Label::Negative);
    assert_eq!(ds.row(0)[..4], [1.0, 6.0, 4.0, 12.0]);
    let (train, test) = split_consecutive(&ds, 500).unwrap();
    assert_eq!((train.len(), test.len()), (500, 500));
    assert_eq!(test.ids()[0], 500);
}

#[test]
fn small_csv_with_header_maps_tokens() {
    let text = "a,b,label\n1,2,1\n3,4,2\n5,6,1\n7,8,2\n";
    let ds = parse_csv(text, "t", 2, "1").unwrap();
    assert_eq!(ds.labels(), &[Label::Positive, Label::Negative, Label::Positive, Label::Negative]);
    assert_eq!(ds.row(1), &[3.0, 4.0]);
    let flipped = parse_csv(text, "t", 2, "2").unwrap();
    assert_eq!(flipped.label(0), Label::Negative);
}

#[test]
fn malformed_csv_is_rejected() {
    assert!(parse_csv("1,abc,1\n2,3,2\n", "t", 2, "1").is_err());
    assert!(parse_csv("1,2,1\n2,3,2\n4,5,3\n", "t", 2, "1").is_err());
    assert!(parse_csv("1,2,1\n2,3,1\n", "t", 2, "1").is_err());
    assert!(parse_csv("1,2,1\n2,3\n", "t", 2, "1").is_err());
    assert!(parse_csv("", "t", 0, "1").is_err());
    assert!(load_csv("/nonexistent/file.csv", 0, "1").is_err());
}

#[test]
fn split_then_concat_reconstructs() {
    let ds = load_csv(german_path(), 24, "1").unwrap();
    for k in [1, 2, 500, 999] {
        let (a, b) = split_consecutive(&ds, k).unwrap();
        assert_eq!(a.concat(&b).unwrap(), ds);
    }
    assert!(split_consecutive(&ds, 0).is_err());
    assert!(split_consecutive(&ds, 1000).is_err());
    let two = Dataset::from_rows(&[vec![0.0], vec![1.0]], vec![Label::Positive, Label::Negative]).unwrap();
    let (a, b) = split_consecutive(&two, 1).unwrap();
    assert_eq!((a.row(0), b.row(0)), (&[0.0][..], &[1.0][..]));
}

#[test]
fn gaussian_generation_is_reproducible() {
    let spec = GaussianSpec::tutorial(7);
    let a = generate_gaussian_2d(&spec).unwrap();
    let b = generate_gaussian_2d(&spec).unwrap();
    assert_eq!(a.features(), b.features());
    assert_eq!(a.len(), 20);
    assert!(a.labels()[..10].iter().all(|l| *l == Label::Positive));
    assert!(a.labels()[10..].iter().all(|l| *l == Label::Negative));
    assert_ne!(generate_gaussian_2d(&GaussianSpec::tutorial(8)).unwrap().features(), a.features());
}

#[test]
fn gaussian_sample_moments_converge() {
    let mut spec = GaussianSpec::tutorial(3);
    spec.n_plus = 40_000;
    spec.n_minus = 40_000;
    let ds = generate_gaussian_2d(&spec).unwrap();
    for (range, mean, cov) in [
        (0..40_000, spec.mean_plus, spec.cov_plus),
        (40_000..80_000, spec.mean_minus, spec.cov_minus),
    ] {
        let n = range.len() as f64;
        let rows: Vec<&[f64]> = range.map(|i| ds.row(i)).collect();
        let m: Vec<f64> = (0..2).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        for j in 0..2 {
            assert!((m[j] - mean[j]).abs() < 4.0 * (cov[j][j] / n).sqrt(), "mean {j}");
            for k in 0..2 {
                let c = rows.iter().map(|r| (r[j] - m[j]) * (r[k] - m[k])).sum::<f64>() / (n - 1.0);
                assert!((c - cov[j][k]).abs() < 0.05, "cov {j}{k}: {c}");
            }
        }
    }
}

#[test]
fn gaussian_edge_cases() {
    let mut spec = GaussianSpec::tutorial(1);
    spec.n_plus = 0;
    let ds = generate_gaussian_2d(&spec).unwrap();
    assert_eq!(ds.class_counts(), (0, 10));
    let mut bad = GaussianSpec::tutorial(1);
    bad.cov_plus = [[1.0, 2.0], [2.0, 1.0]];
    assert!(generate_gaussian_2d(&bad).is_err());
    let mut asym = GaussianSpec::tutorial(1);
    asym.cov_minus = [[1.0, 0.1], [0.2, 1.0]];
    assert!(generate_gaussian_2d(&asym).is_err());
}

#[test]
fn scaling_examples() {
    let ds = Dataset::from_rows(
        &[vec![0.0, 3.0], vec![5.0, 3.0], vec![10.0, 3.0]],
        vec![Label::Positive, Label::Negative, Label::Positive],
    )
    .unwrap();
    let p = fit_scaling(&ds).unwrap();
    assert_eq!((p.shift.clone(), p.scale.clone()), (vec![0.0, 3.0], vec![10.0, 1.0]));
    let s = apply_scaling(&ds, &p).unwrap();
    assert_eq!(s.features(), &[0.0, 0.0, 0.5, 0.0, 1.0, 0.0]);
    assert_eq!(p.apply_point(&[12.0, 3.0]).unwrap(), vec![1.2, 0.0]);
    assert_eq!(ScalingParams::from_text(&p.to_text()).unwrap(), p);
}

#[test]
fn scaled_training_features_lie_in_unit_box() {
    let ds = load_csv(german_path(), 24, "1").unwrap();
    let (train, test) = split_consecutive(&ds, 500).unwrap();
    let p = fit_scaling(&train).unwrap();
    let s = apply_scaling(&train, &p).unwrap();
    assert!(s.features().iter().all(|v| (0.0..=1.0).contains(v)));
    assert_eq!(apply_scaling(&test, &p).unwrap().len(), 500);
}

#[test]
fn csv_echo_round_trips() {
    let ds = generate_gaussian_2d(&GaussianSpec::tutorial(2)).unwrap();
    let text = ds.to_csv_string();
    let back = parse_csv(&text, "echo", 0, "1").unwrap();
    assert_eq!(back.features(), ds.features());
    assert_eq!(back.labels(), ds.labels());
}
