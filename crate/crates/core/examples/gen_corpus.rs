fn main() {
    let args: Vec<String> = std::env::args().collect();
    let dir = std::path::PathBuf::from(&args[1]);
    std::fs::create_dir_all(&dir).unwrap();
    let fingers: u32 = args[2].parse().unwrap();
    let imps: u16 = args[3].parse().unwrap();
    for f in 1..=fingers {
        for i in 1..=imps {
            let img = ridgekit_core::synth::synthetic_fingerprint(400, 400, f as u64, i);
            ridgekit_core::imageio::save_pgm(&img, dir.join(format!("{f}_{i}.pgm"))).unwrap();
        }
    }
    println!("wrote {} images to {}", fingers as usize * imps as usize, dir.display());
}
