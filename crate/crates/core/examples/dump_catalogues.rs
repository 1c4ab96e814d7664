//! Writes the 2×2, 3×3 and 4×4 catalogues as text to a directory.
use std::path::PathBuf;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    for k in 2..=4 {
        let c = regurec::configs::catalogue(k);
        std::fs::write(dir.join(format!("catalogue_{k}x{k}.txt")), c.to_text())?;
    }
    Ok(())
}
