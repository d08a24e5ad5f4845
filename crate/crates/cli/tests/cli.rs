use radaug::expander::{derive_item_seed, pick_pole, tree_digest};
use radaug::io::{read_image, write_image};
use radaug::radial::{radial_transform, RadialParams};
use radaug::seed::splitmix64;
use radaug::{Image, Pole};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn radaug(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radaug"))
        .args(args)
        .output()
        .expect("run radaug")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn seeded(rows: usize, cols: usize, seed: u64) -> Image {
    Image::from_fn(rows, cols, |r, c| {
        (splitmix64(seed.wrapping_add((r * cols + c) as u64)) >> 56) as u8
    })
    .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// `classes` directories of `per_class` seeded 12x12 images.
fn dataset(root: &Path, classes: usize, per_class: usize) {
    for c in 0..classes {
        let dir = root.join(format!("class{c}"));
        fs::create_dir_all(&dir).unwrap();
        for i in 0..per_class {
            let img = seeded(12, 12, (c * 1000 + i) as u64);
            write_image(&img, dir.join(format!("img{i:02}.pgm"))).unwrap();
        }
    }
}

#[test]
fn transform_fixed_pole_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.pgm");
    write_image(&seeded(256, 256, 3), &input).unwrap();
    let (a, b) = (dir.path().join("a.pgm"), dir.path().join("b.pgm"));
    for out in [&a, &b] {
        let run = radaug(&[
            "transform",
            "--kind",
            "radial",
            "--input",
            p(&input),
            "--pole",
            "170,50",
            "--rays",
            "256",
            "--radii",
            "256",
            "--fill",
            "zero",
            "--out",
            p(out),
        ]);
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
        assert!(stdout(&run).contains("pole") && stdout(&run).contains("170,50"));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let img = read_image(&a).unwrap();
    let expected = radial_transform(
        &seeded(256, 256, 3),
        Pole::new(170, 50),
        RadialParams::new(256, 256, Default::default()).unwrap(),
    )
    .unwrap()
    .image;
    assert_eq!(img, expected);
}

#[test]
fn transform_random_pole_and_affine_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.pgm");
    write_image(&seeded(20, 30, 1), &input).unwrap();
    let pole = pick_pole(9, 20, 30);
    let run = radaug(&[
        "transform",
        "--kind",
        "radial",
        "--input",
        p(&input),
        "--pole",
        "random",
        "--seed",
        "9",
        "--out",
        p(&dir.path().join("r.pgm")),
    ]);
    assert_eq!(code(&run), 0);
    assert!(stdout(&run).contains(&format!("= {pole}")));

    let mut outputs = Vec::new();
    for name in ["x.png", "y.png"] {
        let out = dir.path().join(name);
        let run = radaug(&[
            "transform",
            "--kind",
            "affine",
            "--input",
            p(&input),
            "--seed",
            "4",
            "--index",
            "2",
            "--out",
            p(&out),
        ]);
        assert_eq!(code(&run), 0);
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(&outputs[0][1..4], b"PNG");
}

#[test]
fn transform_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("8x8.pgm");
    write_image(&seeded(8, 8, 0), &input).unwrap();
    let out = dir.path().join("o.pgm");
    let outside = radaug(&[
        "transform",
        "--kind",
        "radial",
        "--input",
        p(&input),
        "--pole",
        "9,9",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&outside), 2);
    let garbage = radaug(&[
        "transform",
        "--kind",
        "radial",
        "--input",
        p(&input),
        "--pole",
        "nine",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&garbage), 2);
    let unknown_flag = radaug(&["transform", "--kind", "radial", "--bogus"]);
    assert_eq!(code(&unknown_flag), 2);

    let broken = dir.path().join("broken.pgm");
    fs::write(&broken, b"P5\n8 8\n255\n\x01\x02").unwrap();
    let decode = radaug(&[
        "transform",
        "--kind",
        "radial",
        "--input",
        p(&broken),
        "--pole",
        "0,0",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&decode), 3);
    assert!(!out.exists());
}

#[test]
fn expand_counts_and_rerun_hash() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    dataset(&src, 2, 3);
    let mut hashes = Vec::new();
    for (name, workers) in [("a", "1"), ("b", "4")] {
        let out = dir.path().join(name);
        let run = radaug(&[
            "expand",
            "--kind",
            "radial",
            "--per-image",
            "5",
            "--seed",
            "42",
            "--in-dir",
            p(&src),
            "--out-dir",
            p(&out),
            "--workers",
            workers,
        ]);
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
        let text = stdout(&run);
        assert!(
            text.contains("class0: 15") && text.contains("class1: 15"),
            "{text}"
        );
        hashes.push(tree_digest(&out).unwrap());
    }
    assert_eq!(hashes[0], hashes[1]);

    let ident = dir.path().join("ident");
    let run = radaug(&[
        "expand",
        "--kind",
        "identity",
        "--in-dir",
        p(&src),
        "--out-dir",
        p(&ident),
    ]);
    assert_eq!(code(&run), 0);
    assert!(stdout(&run).contains("class0: 3"));
    assert!(ident.join("manifest.jsonl").exists());
}

#[test]
fn expand_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    dataset(&src, 1, 1);
    let missing = radaug(&[
        "expand",
        "--kind",
        "radial",
        "--in-dir",
        p(&dir.path().join("nope")),
        "--out-dir",
        p(&dir.path().join("o")),
    ]);
    assert_eq!(code(&missing), 2);

    // A regular file where the output directory should go.
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let unwritable = radaug(&[
        "expand",
        "--kind",
        "radial",
        "--per-image",
        "1",
        "--in-dir",
        p(&src),
        "--out-dir",
        p(&blocker),
    ]);
    assert_eq!(code(&unwritable), 3);
}

#[test]
fn montage_layout_and_radial_cells() {
    let dir = tempfile::tempdir().unwrap();
    let inputs: Vec<String> = (0..7)
        .map(|i| {
            let path = dir.path().join(format!("in{i}.pgm"));
            write_image(&seeded(10 + i, 14, i as u64), &path).unwrap();
            p(&path).to_string()
        })
        .collect();

    for n in [1usize, 7] {
        let out = dir.path().join(format!("montage{n}.pgm"));
        let mut args = vec![
            "montage",
            "--cell",
            "32",
            "--seed",
            "11",
            "--out",
            p(&out),
            "--inputs",
        ];
        args.extend(inputs[..n].iter().map(String::as_str));
        let run = radaug(&args);
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
        let grid = read_image(&out).unwrap();
        assert_eq!((grid.rows(), grid.cols()), (96, 32 * n));
    }

    // Radial row, cell i: transform output at the printed pole, resized.
    let grid = read_image(dir.path().join("montage7.pgm")).unwrap();
    for (i, input) in inputs.iter().enumerate() {
        let src = read_image(input).unwrap();
        let pole = pick_pole(derive_item_seed(11, i as u64, 0), src.rows(), src.cols());
        let single = dir.path().join(format!("single{i}.pgm"));
        let run = radaug(&[
            "transform",
            "--kind",
            "radial",
            "--input",
            input,
            "--pole",
            &pole.to_string(),
            "--out",
            p(&single),
        ]);
        assert_eq!(code(&run), 0);
        let cell = read_image(&single).unwrap().resize_nearest(32, 32).unwrap();
        for r in 0..32 {
            for c in 0..32 {
                assert_eq!(
                    grid.get_pixel(64 + r, i * 32 + c).unwrap(),
                    cell.get_pixel(r, c).unwrap()
                );
            }
        }
        let original = src.resize_nearest(32, 32).unwrap();
        assert_eq!(
            grid.get_pixel(5, i * 32 + 7).unwrap(),
            original.get_pixel(5, 7).unwrap()
        );
    }

    let none = radaug(&["montage", "--out", p(&dir.path().join("empty.pgm"))]);
    assert_eq!(code(&none), 2);
}

#[test]
fn eval_memorization_and_seed_range() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    dataset(&src, 3, 4);
    let train = dir.path().join("train");
    assert_eq!(
        code(&radaug(&[
            "expand",
            "--kind",
            "identity",
            "--in-dir",
            p(&src),
            "--out-dir",
            p(&train)
        ])),
        0
    );
    let manifest = train.join("manifest.jsonl");

    let report = dir.path().join("report.jsonl");
    let run = radaug(&[
        "eval",
        "--train-manifest",
        p(&manifest),
        "--test-dir",
        p(&src),
        "--model",
        "knn",
        "--k",
        "1",
        "--report",
        p(&report),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let text = stdout(&run);
    for class in ["class0", "class1", "class2"] {
        let line = text.lines().find(|l| l.starts_with(class)).unwrap();
        assert!(line.contains("100.00"), "{line}");
    }
    let structured = fs::read_to_string(&report).unwrap();
    assert!(structured.lines().next().unwrap().contains("radaug-report"));
    assert!(structured.contains("\"overall_accuracy\":1.0"));

    let radial = dir.path().join("radial");
    assert_eq!(
        code(&radaug(&[
            "expand",
            "--kind",
            "radial",
            "--per-image",
            "3",
            "--in-dir",
            p(&src),
            "--out-dir",
            p(&radial)
        ])),
        0
    );
    let run = radaug(&[
        "eval",
        "--train-manifest",
        p(&radial.join("manifest.jsonl")),
        "--test-dir",
        p(&src),
        "--seeds",
        "1..4",
        "--poles",
        "5",
        "--report",
        p(&report),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let text = stdout(&run);
    assert_eq!(
        text.matches("inference vote (5 poles)").count(),
        4,
        "{text}"
    );
    assert!(
        text.lines()
            .any(|l| l.starts_with("runs 4 | υ ") && l.contains('±')),
        "{text}"
    );
    let headers = fs::read_to_string(&report)
        .unwrap()
        .matches("radaug-report")
        .count();
    assert_eq!(headers, 4);
}

#[test]
fn eval_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    dataset(&src, 2, 2);
    let train = dir.path().join("train");
    radaug(&[
        "expand",
        "--kind",
        "identity",
        "--in-dir",
        p(&src),
        "--out-dir",
        p(&train),
    ]);
    let manifest = train.join("manifest.jsonl");

    let missing = radaug(&[
        "eval",
        "--train-manifest",
        p(&manifest),
        "--test-dir",
        p(&dir.path().join("absent")),
    ]);
    assert_eq!(code(&missing), 2);

    let other = dir.path().join("other");
    dataset(&other, 3, 1);
    let mismatch = radaug(&[
        "eval",
        "--train-manifest",
        p(&manifest),
        "--test-dir",
        p(&other),
    ]);
    assert_eq!(code(&mismatch), 2);
    assert!(String::from_utf8_lossy(&mismatch.stderr).contains("configuration mismatch"));

    let bad_range = radaug(&[
        "eval",
        "--train-manifest",
        p(&manifest),
        "--test-dir",
        p(&src),
        "--seeds",
        "9..1",
    ]);
    assert_eq!(code(&bad_range), 2);
}
