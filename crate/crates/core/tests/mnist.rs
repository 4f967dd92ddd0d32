//! Checks against the official MNIST files. Set `MNIST_DIR` to the directory
//! holding the four uncompressed IDX files and run with `--ignored`.

use std::path::PathBuf;

use topoflow_core::dataset::load_idx;

fn mnist_dir() -> PathBuf {
    PathBuf::from(std::env::var("MNIST_DIR").expect("MNIST_DIR must point at the IDX files"))
}

#[test]
#[ignore]
fn official_files_have_expected_counts() {
    let dir = mnist_dir();
    let train = load_idx(dir.join("train-images-idx3-ubyte"), dir.join("train-labels-idx1-ubyte")).unwrap();
    assert_eq!(train.len(), 60000);
    assert_eq!(train.feature_dim(), 784);
    assert_eq!(train.class_counts()[0], 5923);
    let test = load_idx(dir.join("t10k-images-idx3-ubyte"), dir.join("t10k-labels-idx1-ubyte")).unwrap();
    assert_eq!(test.len(), 10000);
}
