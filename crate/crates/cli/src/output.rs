//! Atomic output and worker-pool setup.

use std::io::Write;
use std::path::Path;

use anyhow::{ensure, Context};

pub const THREADS_ENV: &str = "SUPERACT_THREADS";

/// Write `content` to `path` via a sibling temporary file, or to stdout without a path.
/// A failed run leaves no file behind.
pub fn write_output(path: Option<&Path>, content: &str) -> anyhow::Result<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return match out.write_all(content.as_bytes()).and_then(|()| out.flush()) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => Ok(r?),
        };
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(content.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Cap the global rayon pool at `SUPERACT_THREADS` workers when the variable is set.
pub fn configure_threads(value: Option<&str>) -> anyhow::Result<()> {
    let Some(value) = value else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_ENV}=`{value}` is not a thread count"))?;
    ensure!(n >= 1, "{THREADS_ENV} must be at least 1");
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(())
}
