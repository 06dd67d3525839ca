//! Drives the C ABI end to end from Rust: dataset handle, clustering handle,
//! center extraction, explanations, and teardown.

use clustex_ffi::*;

#[test]
fn c_abi_round_trip() {
    // A 3-cluster layout in 2D, row-major.
    let mut coords: Vec<f64> = Vec::new();
    for (cx, cy) in [(0.0, 0.0), (8.0, 0.0), (0.0, 8.0)] {
        for i in 0..6 {
            coords.push(cx + 0.1 * i as f64);
            coords.push(cy - 0.1 * i as f64);
        }
    }
    let n = coords.len() / 2;

    unsafe {
        let mut ds: *mut ClustexDataset = std::ptr::null_mut();
        let st = clustex_dataset_create(coords.as_ptr(), n, 2, &mut ds);
        assert_eq!(st, ClustexStatus::Ok);
        assert_eq!(clustex_dataset_len(ds), n);
        assert_eq!(clustex_dataset_dim(ds), 2);
        assert!(clustex_dataset_scale(ds) > 0.0);

        let mut cfg = clustex_default_config();
        cfg.k = 3;
        cfg.p = 1;
        cfg.epsilon = 2.0;
        cfg.seed = 9;

        let mut h: *mut ClustexClustering = std::ptr::null_mut();
        let st = clustex_private_clustering(ds, cfg, &mut h);
        assert_eq!(st, ClustexStatus::Ok);
        assert_eq!(clustex_clustering_k(h), 3);
        assert_eq!(clustex_clustering_dim(h), 2);
        assert!(clustex_clustering_cost(h) >= 0.0);
        assert!(clustex_clustering_coreset_size(h) > 0);
        assert!((clustex_clustering_budget_spent(h) - 2.0).abs() < 1e-12);

        let mut centers = vec![0.0f64; 3 * 2];
        let st = clustex_clustering_centers(h, centers.as_mut_ptr(), centers.len());
        assert_eq!(st, ClustexStatus::Ok);
        assert!(centers.iter().all(|c| c.is_finite()));

        let mut too_small = vec![0.0f64; 2];
        let st = clustex_clustering_centers(h, too_small.as_mut_ptr(), too_small.len());
        assert_eq!(st, ClustexStatus::BufferTooSmall);

        let agents = [0usize, 7, 13];
        let mut values = vec![0.0f64; agents.len()];
        let st = clustex_explanations(h, agents.as_ptr(), agents.len(), values.as_mut_ptr());
        assert_eq!(st, ClustexStatus::Ok);
        assert!(values.iter().all(|v| v.is_finite()));

        // Determinism through the ABI: a fresh run matches bit for bit.
        let mut h2: *mut ClustexClustering = std::ptr::null_mut();
        assert_eq!(clustex_private_clustering(ds, cfg, &mut h2), ClustexStatus::Ok);
        assert_eq!(
            clustex_clustering_cost(h).to_bits(),
            clustex_clustering_cost(h2).to_bits()
        );
        clustex_clustering_destroy(h2);

        clustex_clustering_destroy(h);
        clustex_dataset_destroy(ds);
    }
}

#[test]
fn c_abi_rejects_bad_arguments() {
    unsafe {
        let mut ds: *mut ClustexDataset = std::ptr::null_mut();
        assert_eq!(
            clustex_dataset_create(std::ptr::null(), 3, 2, &mut ds),
            ClustexStatus::NullArgument
        );
        let coords = [0.0f64, f64::NAN];
        assert_eq!(
            clustex_dataset_create(coords.as_ptr(), 1, 2, &mut ds),
            ClustexStatus::InvalidArgument
        );

        let coords = [0.0f64, 0.0, 1.0, 1.0];
        assert_eq!(clustex_dataset_create(coords.as_ptr(), 2, 2, &mut ds), ClustexStatus::Ok);
        let mut cfg = clustex_default_config();
        cfg.k = 99; // k > n
        let mut h: *mut ClustexClustering = std::ptr::null_mut();
        assert_eq!(
            clustex_private_clustering(ds, cfg, &mut h),
            ClustexStatus::InvalidArgument
        );
        clustex_dataset_destroy(ds);
    }
    let msg = clustex_status_message(ClustexStatus::EmptyCoreset);
    assert!(!msg.is_null());
}
