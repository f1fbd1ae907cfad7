//! Trajectories of the guided embedding as the off-focus weight goes
//! 1 -> 0.5 -> 0 with the sensory class in focus.
//!
//! cargo run --example guided_sweep [-- OUT_DIR]

use guided_spectral::embedding::{make_schedule, trajectory_sweep, SweepOptions};
use guided_spectral::io::{Provenance, TrajectoryFile};
use guided_spectral::synthetic::{planted_partition, PlantedSpec};
use guided_spectral::{normalize, Error};

fn main() -> Result<(), Error> {
    let (g, groups) = planted_partition(&PlantedSpec::default(), 4);
    let focus = g.nodes_in_class("sensory");
    let schedule = make_schedule(g.n(), &focus, 11, 1.0, 0.5)?.then(make_schedule(g.n(), &focus, 11, 0.5, 0.0)?)?;
    let options = SweepOptions::default();
    let t = trajectory_sweep(&normalize(&g)?, &schedule, &options)?;

    for (s, frame) in t.frames.iter().enumerate().step_by(5) {
        println!(
            "step {s:>2} off-focus {:.2}: zeta_2 {:.4}, zeta_3 {:.4}",
            schedule.off_focus[s], frame.zeta_values.0, frame.zeta_values.1
        );
    }
    let last = t.frames.last().expect("non-empty schedule");
    println!("final positions of the first node in each planted group:");
    for grp in 0..=groups.iter().copied().max().unwrap_or(0) {
        let i = groups.iter().position(|&x| x == grp).unwrap();
        println!("  {:<16} ({:+.4}, {:+.4})", g.labels()[i], last.coords[(i, 0)], last.coords[(i, 1)]);
    }
    for w in &t.warnings {
        println!("warning: step {} gap {:.1e} between {:?}", w.step, w.gap, w.between);
    }

    if let Some(dir) = std::env::args().nth(1) {
        let dir = std::path::PathBuf::from(dir);
        std::fs::create_dir_all(&dir)?;
        let prov = Provenance { config_hash: "example".into(), seed: None };
        let file = TrajectoryFile::from_trajectory(&t, &g, &schedule.focus, &schedule.off_focus, None, options.alignment, &prov);
        file.write(&dir.join("trajectory.json"))?;
        file.write_flat_csv(&dir.join("trajectory.csv"), &prov)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
