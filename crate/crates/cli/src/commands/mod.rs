mod bench;
mod density;
mod gen;
mod images;
mod separate;

pub use bench::bench;
pub use density::density;
pub use gen::gen;
pub use images::demix_images;
pub use separate::separate;

use ica_emk::optimizer::PhaseTimings;

use crate::manifest::RunManifest;

fn record_timings(manifest: &mut RunManifest, t: &PhaseTimings) {
    manifest.timing("whitening", t.whitening.as_secs_f64());
    manifest.timing("init", t.init.as_secs_f64());
    manifest.timing("iterations", t.iterations.as_secs_f64());
}
