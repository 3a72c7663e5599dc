//! Set-of-mark annotation: numbered circles and arrows drawn over the
//! egocentric frame.
//!
//! Every regular action gets an arrow from the bottom-center anchor (the
//! agent's visual proxy) to its projected floor endpoint, capped with a
//! white circle carrying the action id. Turn-around (id 0) is drawn on the
//! left margin with the literal label "Turn Around". Circles are nudged
//! along their arrow when they would overlap an earlier one, and clamped
//! to stay fully inside the image; both adjustments are recorded in the
//! placement list. Text uses an embedded 5x7 bitmap font so output is
//! bit-deterministic.

use image::{Rgb, RgbImage};
use thiserror::Error;

use crate::camera::{CameraModel, Projection};
use crate::proposer::ActionSet;

#[derive(Debug, Error, PartialEq)]
pub enum AnnotateError {
    #[error("image is {iw}x{ih} but camera expects {cw}x{ch}")]
    DimensionMismatch { iw: u32, ih: u32, cw: u32, ch: u32 },
    #[error("action {id} endpoint does not project into the camera ({reason}); clipped actions must stay in view")]
    EndpointNotVisible { id: u32, reason: String },
}

/// Where one action's mark ended up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub id: u32,
    pub center: (i32, i32),
    pub radius_px: i32,
    /// Set when the circle was moved off its projected endpoint to keep
    /// marks legible or inside the image.
    pub nudged: bool,
}

/// Annotated frame plus the recorded mark geometry.
#[derive(Debug, Clone)]
pub struct AnnotatedImage {
    pub rgb: RgbImage,
    /// One entry per regular action, in the set's display order.
    pub placements: Vec<Placement>,
    /// Center of the turn-around glyph when present.
    pub turnaround_center: Option<(i32, i32)>,
}

const CIRCLE_FILL: Rgb<u8> = Rgb([255, 255, 255]);
const INK: Rgb<u8> = Rgb([0, 0, 0]);
/// Circle radius at 1080 rows; scales with image height.
const RADIUS_AT_1080: f64 = 28.0;
const ARROW_WIDTH_AT_1080: f64 = 4.0;

// ---------------------------------------------------------------------------
// 5x7 bitmap font (digits plus the "Turn Around" letters)
// ---------------------------------------------------------------------------

fn glyph(c: char) -> Option<[u8; 7]> {
    Some(match c {
        '0' => [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
        '1' => [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
        '2' => [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
        '3' => [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
        '4' => [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
        '5' => [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
        '6' => [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
        '7' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
        '8' => [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
        '9' => [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
        'T' => [0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04],
        'A' => [0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'u' => [0x00, 0x00, 0x11, 0x11, 0x11, 0x13, 0x0D],
        'r' => [0x00, 0x00, 0x16, 0x19, 0x10, 0x10, 0x10],
        'n' => [0x00, 0x00, 0x16, 0x19, 0x11, 0x11, 0x11],
        'o' => [0x00, 0x00, 0x0E, 0x11, 0x11, 0x11, 0x0E],
        'd' => [0x01, 0x01, 0x0D, 0x13, 0x11, 0x13, 0x0D],
        ' ' => [0; 7],
        _ => return None,
    })
}

fn draw_glyph(img: &mut RgbImage, x: i32, y: i32, c: char, scale: i32, color: Rgb<u8>) {
    let Some(rows) = glyph(c) else { return };
    for (ry, row) in rows.iter().enumerate() {
        for rx in 0..5 {
            if row & (0x10 >> rx) != 0 {
                for sy in 0..scale {
                    for sx in 0..scale {
                        let px = x + rx as i32 * scale + sx;
                        let py = y + ry as i32 * scale + sy;
                        if px >= 0
                            && py >= 0
                            && (px as u32) < img.width()
                            && (py as u32) < img.height()
                        {
                            img.put_pixel(px as u32, py as u32, color);
                        }
                    }
                }
            }
        }
    }
}

fn text_width(text: &str, scale: i32) -> i32 {
    let n = text.chars().count() as i32;
    if n == 0 {
        0
    } else {
        n * 5 * scale + (n - 1) * scale
    }
}

fn draw_text(img: &mut RgbImage, x: i32, y: i32, text: &str, scale: i32, color: Rgb<u8>) {
    let mut cx = x;
    for c in text.chars() {
        draw_glyph(img, cx, y, c, scale, color);
        cx += 6 * scale;
    }
}

fn draw_disc(img: &mut RgbImage, cx: i32, cy: i32, r: i32, color: Rgb<u8>) {
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                let px = cx + dx;
                let py = cy + dy;
                if px >= 0 && py >= 0 && (px as u32) < img.width() && (py as u32) < img.height() {
                    img.put_pixel(px as u32, py as u32, color);
                }
            }
        }
    }
}

fn draw_circle_outline(img: &mut RgbImage, cx: i32, cy: i32, r: i32, w: i32, color: Rgb<u8>) {
    let inner = (r - w).max(0);
    for dy in -r..=r {
        for dx in -r..=r {
            let d2 = dx * dx + dy * dy;
            if d2 <= r * r && d2 >= inner * inner {
                let px = cx + dx;
                let py = cy + dy;
                if px >= 0 && py >= 0 && (px as u32) < img.width() && (py as u32) < img.height() {
                    img.put_pixel(px as u32, py as u32, color);
                }
            }
        }
    }
}

fn draw_line(img: &mut RgbImage, a: (f64, f64), b: (f64, f64), width: i32, color: Rgb<u8>) {
    let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
    let steps = (len * 2.0).ceil() as i32 + 1;
    let r = (width / 2).max(0);
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let x = a.0 + (b.0 - a.0) * t;
        let y = a.1 + (b.1 - a.1) * t;
        draw_disc(img, x.round() as i32, y.round() as i32, r, color);
    }
}

// ---------------------------------------------------------------------------
// Annotation
// ---------------------------------------------------------------------------

/// Render the action set onto a copy of `rgb`.
pub fn annotate(
    rgb: &RgbImage,
    actions: &ActionSet,
    camera: &CameraModel,
) -> Result<AnnotatedImage, AnnotateError> {
    if rgb.width() != camera.width || rgb.height() != camera.height {
        return Err(AnnotateError::DimensionMismatch {
            iw: rgb.width(),
            ih: rgb.height(),
            cw: camera.width,
            ch: camera.height,
        });
    }
    let w = camera.width as i32;
    let h = camera.height as i32;
    let scale = camera.height as f64 / 1080.0;
    let radius = ((RADIUS_AT_1080 * scale).round() as i32).max(5);
    let arrow_w = ((ARROW_WIDTH_AT_1080 * scale).round() as i32).max(1);
    let anchor = ((w / 2) as f64, (h - 1) as f64);

    // Project endpoints; the bottom edge may clip very short actions, which
    // is recorded as a nudge rather than an error.
    struct Pending {
        id: u32,
        target: (f64, f64),
        rank: u32,
        nudged: bool,
    }
    let mut pending: Vec<Pending> = Vec::new();
    for a in &actions.actions {
        let endpoint = camera.action_endpoint(a.action);
        let (u, v, clipped) = match camera.project(endpoint) {
            Projection::InView(p) => (p.u, p.v, false),
            Projection::OutsideImage(p) => {
                let horizontally_ok = p.u >= 0.0 && p.u < w as f64;
                if horizontally_ok && p.v >= h as f64 {
                    // Endpoint under the bottom edge (very short action).
                    (p.u, (h - 1) as f64, true)
                } else {
                    return Err(AnnotateError::EndpointNotVisible {
                        id: a.id,
                        reason: format!("projects to ({:.1}, {:.1})", p.u, p.v),
                    });
                }
            }
            Projection::Behind => {
                return Err(AnnotateError::EndpointNotVisible {
                    id: a.id,
                    reason: "behind the camera".into(),
                })
            }
        };
        pending.push(Pending {
            id: a.id,
            target: (u, v),
            rank: a.insertion_rank,
            nudged: clipped,
        });
    }

    // Resolve overlaps in insertion order: the later insertion moves.
    let clamp_center = |p: (f64, f64)| -> (f64, f64) {
        (
            p.0.clamp(radius as f64, (w - 1 - radius) as f64),
            p.1.clamp(radius as f64, (h - 1 - radius) as f64),
        )
    };
    pending.sort_by_key(|p| p.rank);
    let mut placed: Vec<(u32, (f64, f64), bool)> = Vec::new();
    for p in &pending {
        let mut center = clamp_center(p.target);
        let mut nudged = p.nudged || center != p.target;
        let min_gap = (2 * radius) as f64;
        let clear = |c: (f64, f64), placed: &[(u32, (f64, f64), bool)]| {
            placed
                .iter()
                .all(|(_, q, _)| ((c.0 - q.0).powi(2) + (c.1 - q.1).powi(2)).sqrt() >= min_gap)
        };
        if !clear(center, &placed) {
            // Slide along the arrow direction by the minimal amount, trying
            // both ways, preferring toward the anchor.
            let dir = {
                let dx = p.target.0 - anchor.0;
                let dy = p.target.1 - anchor.1;
                let n = (dx * dx + dy * dy).sqrt().max(1e-9);
                (dx / n, dy / n)
            };
            let mut best: Option<(f64, f64)> = None;
            let mut t = 1.0;
            while t < (w + h) as f64 {
                for s in [-t, t] {
                    let c = clamp_center((center.0 + dir.0 * s, center.1 + dir.1 * s));
                    if clear(c, &placed) {
                        best = Some(c);
                        break;
                    }
                }
                if best.is_some() {
                    break;
                }
                t += 1.0;
            }
            center = best.unwrap_or(center);
            nudged = true;
        }
        placed.push((p.id, center, nudged));
    }

    let mut img = rgb.clone();
    // Arrows first so circles draw over their tips.
    for (_, center, _) in &placed {
        draw_line(&mut img, anchor, *center, arrow_w, INK);
    }
    let mut placements: Vec<Placement> = Vec::new();
    for (id, center, nudged) in &placed {
        let (cx, cy) = (center.0.round() as i32, center.1.round() as i32);
        draw_disc(&mut img, cx, cy, radius, CIRCLE_FILL);
        draw_circle_outline(&mut img, cx, cy, radius, (arrow_w / 2).max(1), INK);
        let label = id.to_string();
        // Fit the label inside the circle.
        let mut fs = ((radius as f64 / 8.0).round() as i32).max(1);
        while text_width(&label, fs) > radius * 3 / 2 && fs > 1 {
            fs -= 1;
        }
        let tx = cx - text_width(&label, fs) / 2;
        let ty = cy - (7 * fs) / 2;
        draw_text(&mut img, tx, ty, &label, fs, INK);
        placements.push(Placement {
            id: *id,
            center: (cx, cy),
            radius_px: radius,
            nudged: *nudged,
        });
    }

    // Side-annotated turn-around.
    let turnaround_center = if actions.includes_turnaround {
        let cx = radius + arrow_w + 2;
        let cy = h / 2;
        draw_disc(&mut img, cx, cy, radius, CIRCLE_FILL);
        draw_circle_outline(&mut img, cx, cy, radius, (arrow_w / 2).max(1), INK);
        let fs = ((radius as f64 / 8.0).round() as i32).max(1);
        draw_text(
            &mut img,
            cx - text_width("0", fs) / 2,
            cy - (7 * fs) / 2,
            "0",
            fs,
            INK,
        );
        // Label below the glyph on a white backing strip so it stays
        // legible over any scene.
        let label = "Turn Around";
        let lfs = (fs / 2).max(1);
        let ly = cy + radius + lfs * 2;
        let lw = text_width(label, lfs);
        for py in (ly - lfs)..(ly + 8 * lfs) {
            for px in 0..(lw + 2 * lfs).min(w - 1) {
                if py >= 0 && py < h {
                    img.put_pixel(px as u32, py as u32, CIRCLE_FILL);
                }
            }
        }
        draw_text(&mut img, lfs, ly, label, lfs, INK);
        Some((cx, cy))
    } else {
        None
    };

    // Restore display order for the placement list.
    placements.sort_by_key(|p| {
        actions
            .actions
            .iter()
            .position(|a| a.id == p.id)
            .unwrap_or(usize::MAX)
    });

    Ok(AnnotatedImage {
        rgb: img,
        placements,
        turnaround_center,
    })
}
