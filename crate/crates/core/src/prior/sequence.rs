use std::fs;
use std::path::{Path, PathBuf};

use image::{GrayImage, RgbImage};

use crate::error::{Error, Result};

const FRAME_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

/// Name of the ground-truth subdirectory next to the frames.
pub const GROUND_TRUTH_DIR: &str = "groundtruth";

/// Ordered RGB frames of identical size, with optional aligned masks.
#[derive(Clone, Debug)]
pub struct ImageSequence {
    frames: Vec<RgbImage>,
    names: Vec<String>,
    masks: Option<Vec<GrayImage>>,
}

impl ImageSequence {
    pub fn new(
        frames: Vec<RgbImage>,
        names: Vec<String>,
        masks: Option<Vec<GrayImage>>,
    ) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::param(format!("need at least 2 frames, got {}", frames.len())));
        }
        if names.len() != frames.len() {
            return Err(Error::param("frame and name counts differ"));
        }
        let dims = frames[0].dimensions();
        if dims.0 == 0 || dims.1 == 0 {
            return Err(Error::param("frames must be non-empty"));
        }
        if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| f.dimensions() != dims) {
            return Err(Error::param(format!(
                "frame {} ({}) is {:?}, expected {:?}",
                i,
                names[i],
                f.dimensions(),
                dims
            )));
        }
        if let Some(masks) = &masks {
            if masks.len() != frames.len() {
                return Err(Error::param("mask and frame counts differ"));
            }
            if let Some(i) = masks.iter().position(|m| m.dimensions() != dims) {
                return Err(Error::param(format!("mask for {} does not match frame size", names[i])));
            }
        }
        Ok(Self { frames, names, masks })
    }

    /// Reads every PNG/JPEG in `dir` (sorted by file name). Masks are taken
    /// from `dir/groundtruth/` when every frame has one.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let paths = list_frames(dir)?;
        if paths.is_empty() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "no PNG/JPEG frames found"),
            ));
        }
        let mut frames = Vec::with_capacity(paths.len());
        let mut names = Vec::with_capacity(paths.len());
        for p in &paths {
            let img = image::open(p).map_err(|source| Error::Image { path: p.clone(), source })?;
            frames.push(img.to_rgb8());
            names.push(stem(p));
        }
        let gt_dir = dir.join(GROUND_TRUTH_DIR);
        let masks = if gt_dir.is_dir() {
            match load_ground_truth(&gt_dir, &names) {
                Ok(m) => Some(m),
                Err(e) => {
                    log::warn!("ignoring ground truth: {e}");
                    None
                }
            }
        } else {
            None
        };
        Self::new(frames, names, masks)
    }

    /// Writes frames as `<name>.png` and masks into `groundtruth/`.
    pub fn save_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (f, n) in self.frames.iter().zip(&self.names) {
            let path = dir.join(format!("{n}.png"));
            f.save(&path).map_err(|source| Error::Image { path, source })?;
        }
        if let Some(masks) = &self.masks {
            let gt = dir.join(GROUND_TRUTH_DIR);
            fs::create_dir_all(&gt).map_err(|e| Error::io(&gt, e))?;
            for (m, n) in masks.iter().zip(&self.names) {
                let path = gt.join(format!("{n}.png"));
                m.save(&path).map_err(|source| Error::Image { path, source })?;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn width(&self) -> u32 {
        self.frames[0].width()
    }

    pub fn height(&self) -> u32 {
        self.frames[0].height()
    }

    pub fn pixels(&self) -> usize {
        (self.width() * self.height()) as usize
    }

    pub fn frames(&self) -> &[RgbImage] {
        &self.frames
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn masks(&self) -> Option<&[GrayImage]> {
        self.masks.as_deref()
    }
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_frame = path.is_file()
            && path
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| FRAME_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if is_frame {
            paths.push(path);
        }
    }
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(paths)
}

/// Loads one mask per frame name from `gt_dir`, matching on file stem.
/// Fails with the full list of names that have no mask.
pub fn load_ground_truth(gt_dir: &Path, names: &[String]) -> Result<Vec<GrayImage>> {
    let available: Vec<PathBuf> = if gt_dir.is_dir() { list_frames(gt_dir)? } else { Vec::new() };
    let mut masks = Vec::with_capacity(names.len());
    let mut missing = Vec::new();
    for n in names {
        match available.iter().find(|p| stem(p) == *n) {
            Some(p) => {
                let img =
                    image::open(p).map_err(|source| Error::Image { path: p.clone(), source })?;
                masks.push(img.to_luma8());
            }
            None => missing.push(n.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::io(
            gt_dir,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("missing ground truth for: {}", missing.join(", ")),
            ),
        ));
    }
    Ok(masks)
}
