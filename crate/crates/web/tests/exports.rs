use gsampler_web::{
    compare_arms, eligibility_curve, eligibility_vs_s, parse_ids, similarity_explorer, similarity_report, CompareSpec,
    GraphSpec,
};
use serde_json::Value;

fn spec(shuffle: bool) -> GraphSpec {
    GraphSpec {
        clusters: 4,
        nodes_per_cluster: 64,
        p_intra: 0.2,
        p_inter: 0.01,
        shuffle,
        seed: 3,
    }
}

#[test]
fn worked_similarity() {
    let v = similarity_report("13, 5 9").unwrap();
    assert_eq!(v["real"], serde_json::json!([5, 9, 13]));
    assert_eq!(v["good"], serde_json::json!([5, 6, 7]));
    assert_eq!(v["dot"], "170");
    assert_eq!(v["norm"], "275");
    assert!((v["similarity"].as_f64().unwrap() - 170.0 / 275.0).abs() < 1e-12);
    assert_eq!(v["gaps"], serde_json::json!([0, 3, 6]));
}

#[test]
fn bad_input_is_an_error_object() {
    let v: Value = serde_json::from_str(&similarity_explorer("1, x")).unwrap();
    assert!(v["error"].is_string());
    let v: Value = serde_json::from_str(&similarity_explorer("")).unwrap();
    assert!(v["error"].is_string());
    assert!(parse_ids("4294967296").is_err());
    let v: Value = serde_json::from_str(&eligibility_vs_s(100, 100, 0.1, 0.0, false, 0, 2, 10)).unwrap();
    assert!(v["error"].as_str().unwrap().contains("8192"));
}

#[test]
fn curve_is_non_increasing() {
    let v = eligibility_curve(&spec(false), 2, 20).unwrap();
    let curve = v["curve"].as_array().unwrap();
    assert_eq!(curve.len(), 21);
    let e: Vec<f64> = curve.iter().map(|p| p["eligible"].as_f64().unwrap()).collect();
    assert!(e.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(v["histogram"].as_array().unwrap().len(), 20);
    // shuffling spreads neighbor ids out
    let shuffled = eligibility_curve(&spec(true), 2, 20).unwrap();
    assert!(shuffled["mean_similarity"].as_f64().unwrap() < v["mean_similarity"].as_f64().unwrap());
}

#[test]
fn comparison_has_both_series() {
    let c = CompareSpec {
        n: 2,
        s: 0.1,
        budget: 32,
        batches: 12,
        l2_lines: 64,
        l3_lines: 256,
    };
    let v = compare_arms(&spec(true), &c).unwrap();
    assert!(v["l3_dram_ratio"].is_number());
    for arm in ["vanilla", "ours"] {
        assert_eq!(v["series"][arm]["l3_dram"].as_array().unwrap().len(), 12);
        assert_eq!(v["series"][arm]["cc"].as_array().unwrap().len(), 12);
    }
    assert_eq!(compare_arms(&spec(true), &c).unwrap(), v);
    let bad = CompareSpec { l3_lines: 8, ..c };
    assert!(compare_arms(&spec(true), &bad).is_err());
}
