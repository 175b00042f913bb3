//! Drive the command-line front end in process: sample a soliton triple,
//! verify it against a config, then evolve from the same config.

use akns::cli::run;

fn call(args: &[&str]) -> i32 {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("akns").chain(args.iter().copied()), &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    code
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("akns-cli-session");
    std::fs::create_dir_all(&dir)?;
    let cfg = dir.join("nls.cfg");
    std::fs::write(
        &cfg,
        "[grid]\nn = 256\nL = 40\n\n[flows]\npreset = nls\n\n[run]\nt_end = 0.5\ndt = 1e-3\nobserve = [0.25]\n\n\
         [initial]\nsolution = soliton\na = 1\n",
    )?;
    let snaps = dir.join("triple");
    let code = call(&[
        "sample", "--solution", "soliton", "--grid", "256,40", "--times", "0.3", "--triple", "1e-4", "--out",
        snaps.to_str().unwrap(),
    ]);
    println!("sample exit {code}");
    let code = call(&["verify", "residual", "--snapshots", snaps.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    println!("verify exit {code}");
    let code = call(&["evolve", "--config", cfg.to_str().unwrap(), "--out", dir.join("run").to_str().unwrap()]);
    println!("evolve exit {code}, output in {}", dir.display());
    Ok(())
}
