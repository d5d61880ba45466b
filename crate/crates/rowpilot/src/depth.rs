//! Depth-map perception: normalization, far-field thresholding, connected
//! component extraction, window selection, and the impending-collision check.

use thiserror::Error;

/// Sensor depth ceiling in millimeters. Values above this never occur in a
/// valid [`DepthFrame`]; 0 marks an invalid / no-return pixel.
pub const MAX_DEPTH_MM: u16 = 8000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DepthError {
    /// Every pixel of the frame is 0 (no valid depth return). Callers treat
    /// this as a depth failure and fall back to the backup controller.
    #[error("depth frame contains no valid (nonzero) pixels")]
    AllInvalid,
    #[error("data length {got} does not match {height}x{width}")]
    BadDimensions {
        height: usize,
        width: usize,
        got: usize,
    },
    #[error("depth value {value} exceeds sensor range {max} mm", max = MAX_DEPTH_MM)]
    OutOfRange { value: u16 },
}

/// Row-major grid of depth samples in millimeters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthFrame {
    height: usize,
    width: usize,
    data: Vec<u16>,
}

impl DepthFrame {
    /// Builds a frame, validating the length and the sensor range.
    pub fn new(height: usize, width: usize, data: Vec<u16>) -> Result<Self, DepthError> {
        if data.len() != height * width {
            return Err(DepthError::BadDimensions {
                height,
                width,
                got: data.len(),
            });
        }
        if let Some(&value) = data.iter().find(|&&v| v > MAX_DEPTH_MM) {
            return Err(DepthError::OutOfRange { value });
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    /// Uniform frame filled with `value`.
    pub fn filled(height: usize, width: usize, value: u16) -> Self {
        Self::new(height, width, vec![value; height * width]).expect("fill value within range")
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.data[y * self.width + x]
    }

    pub(crate) fn data_mut(&mut self) -> &mut [u16] {
        &mut self.data
    }
}

/// Depth frame rescaled so the farthest valid sample is exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedDepth {
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl NormalizedDepth {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }
}

/// One bit per pixel: 1 = far field, 0 = near field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    height: usize,
    width: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(height: usize, width: usize, data: Vec<bool>) -> Self {
        assert_eq!(data.len(), height * width, "mask length mismatch");
        Self {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }
}

/// Tight axis-aligned bounding box of one connected far-field component.
/// Coordinates are inclusive pixel indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentBox {
    pub x_min: usize,
    pub y_min: usize,
    pub x_max: usize,
    pub y_max: usize,
}

impl ComponentBox {
    /// Area of the bounding rectangle in pixels², not the component pixel
    /// count.
    pub fn box_area(&self) -> usize {
        (self.x_max - self.x_min + 1) * (self.y_max - self.y_min + 1)
    }

    /// Horizontal midpoint of the box; lands on half-pixels for even widths.
    pub fn center_x(&self) -> f64 {
        (self.x_min + self.x_max) as f64 / 2.0
    }
}

/// The selected control window: the largest far-field box that passed the
/// area threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub window: ComponentBox,
    /// Column of the window center, real-valued.
    pub center_x: f64,
}

/// Thresholds for the depth pipeline and the obstacle check.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthPipelineParams {
    /// Far-field threshold on normalized depth, strictly inside (0, 1).
    pub t_distance: f32,
    /// Minimum acceptable window box area in pixels².
    pub t_area: usize,
    /// Depth below which a valid pixel counts as an impending collision.
    pub stop_distance_mm: u16,
    /// Fraction of valid ROI pixels that must be near to trigger a stop.
    pub stop_fraction: f64,
    /// Width of the central obstacle ROI as a fraction of the frame width.
    pub stop_roi_fraction: f64,
}

impl DepthPipelineParams {
    /// Defaults for a given frame size; the area threshold is 1% of the
    /// frame pixels.
    pub fn for_frame_size(width: usize, height: usize) -> Self {
        Self {
            t_distance: 0.5,
            t_area: ((width * height) as f64 * 0.01).ceil() as usize,
            stop_distance_mm: 500,
            stop_fraction: 0.05,
            stop_roi_fraction: 1.0 / 3.0,
        }
    }
}

impl Default for DepthPipelineParams {
    fn default() -> Self {
        Self::for_frame_size(640, 480)
    }
}

/// Rescales the frame by its maximum valid sample, so the threshold that
/// follows adapts to whatever range the sensor actually returned.
///
/// Invalid (0) pixels are excluded from the maximum and stay 0, i.e. they
/// are always near field.
pub fn normalize_depth(frame: &DepthFrame) -> Result<NormalizedDepth, DepthError> {
    let max = frame.data.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return Err(DepthError::AllInvalid);
    }
    let max = max as f32;
    let data = frame.data.iter().map(|&v| v as f32 / max).collect();
    Ok(NormalizedDepth {
        height: frame.height,
        width: frame.width,
        data,
    })
}

/// Marks pixels strictly beyond `t_distance` as far field.
pub fn threshold_far_field(nd: &NormalizedDepth, t_distance: f32) -> BinaryMask {
    debug_assert!(t_distance > 0.0 && t_distance < 1.0);
    BinaryMask {
        height: nd.height,
        width: nd.width,
        data: nd.data.iter().map(|&v| v > t_distance).collect(),
    }
}

/// Bounding boxes of the 8-connected components of the mask's 1-bits.
///
/// Two-pass labeling with union-find over provisional row labels; boxes are
/// tight. Output order is unspecified.
pub fn extract_components(mask: &BinaryMask) -> Vec<ComponentBox> {
    let (w, h) = (mask.width, mask.height);
    if w == 0 || h == 0 {
        return Vec::new();
    }

    // labels[i] = 0 for background, otherwise a provisional label.
    let mut labels = vec![0u32; w * h];
    // parent[l] for union-find; entry 0 is the unused background slot.
    let mut parent: Vec<u32> = vec![0];

    fn find(parent: &mut [u32], mut l: u32) -> u32 {
        while parent[l as usize] != l {
            parent[l as usize] = parent[parent[l as usize] as usize];
            l = parent[l as usize];
        }
        l
    }

    fn union(parent: &mut [u32], a: u32, b: u32) {
        let ra = find(parent, a);
        let rb = find(parent, b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[hi as usize] = lo;
        }
    }

    for y in 0..h {
        for x in 0..w {
            if !mask.data[y * w + x] {
                continue;
            }
            let mut neighbor = 0u32;
            let merge = |l: u32, parent: &mut [u32], neighbor: &mut u32| {
                if l == 0 {
                    return;
                }
                if *neighbor == 0 {
                    *neighbor = l;
                } else if l != *neighbor {
                    union(parent, l, *neighbor);
                }
            };
            if x > 0 {
                merge(labels[y * w + x - 1], &mut parent, &mut neighbor);
            }
            if y > 0 {
                let row_above = (y - 1) * w;
                if x > 0 {
                    merge(labels[row_above + x - 1], &mut parent, &mut neighbor);
                }
                merge(labels[row_above + x], &mut parent, &mut neighbor);
                if x + 1 < w {
                    merge(labels[row_above + x + 1], &mut parent, &mut neighbor);
                }
            }
            labels[y * w + x] = if neighbor == 0 {
                let fresh = parent.len() as u32;
                parent.push(fresh);
                fresh
            } else {
                neighbor
            };
        }
    }

    // Second pass: fold every pixel into its root's bounding box.
    let mut slot = vec![u32::MAX; parent.len()];
    let mut boxes: Vec<ComponentBox> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let l = labels[y * w + x];
            if l == 0 {
                continue;
            }
            let root = find(&mut parent, l) as usize;
            let s = slot[root];
            if s == u32::MAX {
                slot[root] = boxes.len() as u32;
                boxes.push(ComponentBox {
                    x_min: x,
                    y_min: y,
                    x_max: x,
                    y_max: y,
                });
            } else {
                let b = &mut boxes[s as usize];
                b.x_min = b.x_min.min(x);
                b.x_max = b.x_max.max(x);
                b.y_max = b.y_max.max(y); // y only grows in scan order
            }
        }
    }
    boxes
}

/// Picks the largest box whose area meets `t_area`, or `None` when nothing
/// qualifies (the fallback trigger).
///
/// Ties on area are broken toward the box whose center is closest to the
/// frame center, then by position, so the result does not depend on input
/// order.
pub fn select_window(
    boxes: &[ComponentBox],
    t_area: usize,
    frame_width: usize,
) -> Option<Detection> {
    let frame_cx = frame_width as f64 / 2.0;
    boxes
        .iter()
        .filter(|b| b.box_area() >= t_area)
        .max_by(|a, b| {
            let dist_a = (a.center_x() - frame_cx).abs();
            let dist_b = (b.center_x() - frame_cx).abs();
            a.box_area()
                .cmp(&b.box_area())
                .then_with(|| dist_b.partial_cmp(&dist_a).unwrap())
                .then_with(|| b.x_min.cmp(&a.x_min))
                .then_with(|| b.y_min.cmp(&a.y_min))
        })
        .map(|b| Detection {
            window: *b,
            center_x: b.center_x(),
        })
}

/// Full perception pass: normalize, threshold, extract components, select
/// the window. An all-invalid frame yields `None` rather than an error.
pub fn detect_row_end(frame: &DepthFrame, params: &DepthPipelineParams) -> Option<Detection> {
    let nd = normalize_depth(frame).ok()?;
    let mask = threshold_far_field(&nd, params.t_distance);
    let boxes = extract_components(&mask);
    select_window(&boxes, params.t_area, frame.width)
}

/// True when the central ROI contains enough close returns to demand an
/// immediate stop. A ROI with no valid pixels at all also returns true.
pub fn check_obstacle(frame: &DepthFrame, params: &DepthPipelineParams) -> bool {
    let w = frame.width;
    let h = frame.height;
    if w == 0 || h == 0 {
        return true;
    }
    let roi_w = ((w as f64 * params.stop_roi_fraction).round() as usize).clamp(1, w);
    let x0 = (w - roi_w) / 2;
    let x1 = x0 + roi_w;

    let mut valid = 0usize;
    let mut near = 0usize;
    for y in 0..h {
        let row = &frame.data[y * w..(y + 1) * w];
        for &v in &row[x0..x1] {
            if v == 0 {
                continue;
            }
            valid += 1;
            if v < params.stop_distance_mm {
                near += 1;
            }
        }
    }
    if valid == 0 {
        return true;
    }
    near as f64 / valid as f64 > params.stop_fraction
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn frame(h: usize, w: usize, data: Vec<u16>) -> DepthFrame {
        DepthFrame::new(h, w, data).unwrap()
    }

    fn mask_from_bits(h: usize, w: usize, bits: &[u8]) -> BinaryMask {
        BinaryMask::new(h, w, bits.iter().map(|&b| b != 0).collect())
    }

    /// Test-only flood fill, independent of the union-find labeling above.
    fn flood_fill_boxes(mask: &BinaryMask) -> Vec<ComponentBox> {
        let (w, h) = (mask.width(), mask.height());
        let mut seen = vec![false; w * h];
        let mut boxes = Vec::new();
        for sy in 0..h {
            for sx in 0..w {
                if !mask.get(sx, sy) || seen[sy * w + sx] {
                    continue;
                }
                let mut stack = vec![(sx, sy)];
                seen[sy * w + sx] = true;
                let mut b = ComponentBox {
                    x_min: sx,
                    y_min: sy,
                    x_max: sx,
                    y_max: sy,
                };
                while let Some((x, y)) = stack.pop() {
                    b.x_min = b.x_min.min(x);
                    b.x_max = b.x_max.max(x);
                    b.y_min = b.y_min.min(y);
                    b.y_max = b.y_max.max(y);
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            let nx = x as i64 + dx;
                            let ny = y as i64 + dy;
                            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                                continue;
                            }
                            let (nx, ny) = (nx as usize, ny as usize);
                            if mask.get(nx, ny) && !seen[ny * w + nx] {
                                seen[ny * w + nx] = true;
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
                boxes.push(b);
            }
        }
        boxes
    }

    fn sorted(mut boxes: Vec<ComponentBox>) -> Vec<ComponentBox> {
        boxes.sort_by_key(|b| (b.y_min, b.x_min, b.y_max, b.x_max));
        boxes
    }

    #[test]
    fn normalize_uniform_frame_is_all_ones() {
        let nd = normalize_depth(&DepthFrame::filled(4, 4, 4000)).unwrap();
        assert!(nd.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn normalize_divides_by_max() {
        let nd = normalize_depth(&frame(2, 2, vec![8000, 4000, 2000, 0])).unwrap();
        assert_eq!(nd.data(), &[1.0, 0.5, 0.25, 0.0]);
    }

    #[test]
    fn normalize_rejects_all_invalid() {
        assert_eq!(
            normalize_depth(&DepthFrame::filled(3, 3, 0)).unwrap_err(),
            DepthError::AllInvalid
        );
    }

    #[test]
    fn normalize_ratios_survive_requantization() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data: Vec<u16> = (0..256).map(|_| rng.gen_range(0..=MAX_DEPTH_MM)).collect();
        let f = frame(16, 16, data);
        let nd = normalize_depth(&f).unwrap();
        let max = f.data().iter().copied().max().unwrap() as f32;
        let requantized: Vec<u16> = nd.data().iter().map(|&v| (v * max).round() as u16).collect();
        assert_eq!(requantized, f.data());
        let nd2 = normalize_depth(&frame(16, 16, requantized)).unwrap();
        assert_eq!(nd.data(), nd2.data());
    }

    #[test]
    fn threshold_is_strictly_greater() {
        let nd = normalize_depth(&frame(2, 2, vec![8000, 4000, 2000, 0])).unwrap();
        let m = threshold_far_field(&nd, 0.5);
        assert_eq!(m.data(), &[true, false, false, false]);
        let m = threshold_far_field(&nd, 0.2);
        assert_eq!(m.data(), &[true, true, true, false]);
    }

    #[test]
    fn threshold_near_one_keeps_only_the_unique_max() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut data: Vec<u16> = (0..64).map(|_| rng.gen_range(1..7000)).collect();
            let peak = rng.gen_range(0..64);
            data[peak] = 8000;
            // Brute-force scan for the expected argmax.
            let expect: Vec<bool> = data.iter().map(|&v| v == 8000).collect();
            let nd = normalize_depth(&frame(8, 8, data)).unwrap();
            let m = threshold_far_field(&nd, 0.9999);
            assert_eq!(m.data(), &expect[..]);
        }
    }

    #[test]
    fn threshold_masks_are_nested_in_t() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data: Vec<u16> = (0..400).map(|_| rng.gen_range(0..=MAX_DEPTH_MM)).collect();
        let nd = normalize_depth(&frame(20, 20, data)).unwrap();
        let coarse = threshold_far_field(&nd, 0.7);
        let fine = threshold_far_field(&nd, 0.3);
        for (hi, lo) in coarse.data().iter().zip(fine.data()) {
            assert!(!hi | lo, "mask(t2) must be a subset of mask(t1) for t1 < t2");
        }
    }

    #[test]
    fn detection_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &k in &[2u16, 3, 5, 8] {
            let data: Vec<u16> = (0..256).map(|_| rng.gen_range(0..=1000)).collect();
            let scaled: Vec<u16> = data.iter().map(|&v| v * k).collect();
            let base = threshold_far_field(&normalize_depth(&frame(16, 16, data)).unwrap(), 0.5);
            let big = threshold_far_field(&normalize_depth(&frame(16, 16, scaled)).unwrap(), 0.5);
            assert_eq!(base.data(), big.data());
        }
    }

    #[test]
    fn components_of_empty_mask() {
        let m = BinaryMask::new(4, 4, vec![false; 16]);
        assert!(extract_components(&m).is_empty());
    }

    #[test]
    fn component_of_solid_block_is_its_own_box() {
        // 10 rows by 20 columns, filled, anchored at the origin.
        let mut bits = vec![0u8; 32 * 32];
        for y in 0..10 {
            for x in 0..20 {
                bits[y * 32 + x] = 1;
            }
        }
        let boxes = extract_components(&mask_from_bits(32, 32, &bits));
        assert_eq!(
            boxes,
            vec![ComponentBox {
                x_min: 0,
                y_min: 0,
                x_max: 19,
                y_max: 9
            }]
        );
        assert_eq!(boxes[0].box_area(), 200);
    }

    #[test]
    fn components_match_flood_fill_on_random_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..60 {
            let density = rng.gen_range(0.1..0.9);
            let bits: Vec<bool> = (0..32 * 32).map(|_| rng.gen_bool(density)).collect();
            let m = BinaryMask::new(32, 32, bits);
            assert_eq!(
                sorted(extract_components(&m)),
                sorted(flood_fill_boxes(&m))
            );
        }
    }

    #[test]
    fn every_set_bit_lies_in_exactly_one_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let w = rng.gen_range(1..=64);
            let h = rng.gen_range(1..=64);
            let bits: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(0.4)).collect();
            let m = BinaryMask::new(h, w, bits);
            let boxes = extract_components(&m);
            for y in 0..h {
                for x in 0..w {
                    if !m.get(x, y) {
                        continue;
                    }
                    let containing = boxes
                        .iter()
                        .filter(|b| {
                            x >= b.x_min && x <= b.x_max && y >= b.y_min && y <= b.y_max
                        })
                        .count();
                    assert!(containing >= 1, "set bit outside every box");
                }
            }
            // Tight boxes: each edge of each box touches a component pixel.
            for b in &boxes {
                assert!((b.x_min..=b.x_max).any(|x| m.get(x, b.y_min)));
                assert!((b.x_min..=b.x_max).any(|x| m.get(x, b.y_max)));
                assert!((b.y_min..=b.y_max).any(|y| m.get(b.x_min, y)));
                assert!((b.y_min..=b.y_max).any(|y| m.get(b.x_max, y)));
            }
        }
    }

    fn boxed(x_min: usize, y_min: usize, x_max: usize, y_max: usize) -> ComponentBox {
        ComponentBox {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    #[test]
    fn select_empty_list_is_no_window() {
        assert_eq!(select_window(&[], 10, 640), None);
    }

    #[test]
    fn select_takes_the_largest_qualifying_box() {
        let boxes = vec![boxed(0, 0, 9, 4), boxed(20, 0, 39, 9)]; // areas 50 and 200
        let det = select_window(&boxes, 100, 640).unwrap();
        assert_eq!(det.window, boxes[1]);
        assert_eq!(det.center_x, 29.5);
    }

    #[test]
    fn select_rejects_when_max_area_below_threshold() {
        let boxes = vec![boxed(0, 0, 9, 4), boxed(20, 0, 29, 7)]; // areas 50 and 80
        assert_eq!(select_window(&boxes, 100, 640), None);
    }

    #[test]
    fn select_tie_breaks_toward_frame_center() {
        let near_center = boxed(300, 0, 339, 9); // center 319.5
        let off_center = boxed(500, 0, 539, 9); // center 519.5, same area
        let det = select_window(&[off_center, near_center], 10, 640).unwrap();
        assert_eq!(det.window, near_center);
    }

    #[test]
    fn select_is_order_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let mut boxes: Vec<ComponentBox> = (0..8)
                .map(|_| {
                    let x0 = rng.gen_range(0..600);
                    let y0 = rng.gen_range(0..400);
                    boxed(
                        x0,
                        y0,
                        x0 + rng.gen_range(0..40),
                        y0 + rng.gen_range(0..40),
                    )
                })
                .collect();
            let reference = select_window(&boxes, 50, 640);
            for _ in 0..5 {
                boxes.shuffle(&mut rng);
                assert_eq!(select_window(&boxes, 50, 640), reference);
            }
        }
    }

    #[test]
    fn detect_maps_all_invalid_to_no_window() {
        let params = DepthPipelineParams::for_frame_size(8, 8);
        assert_eq!(detect_row_end(&DepthFrame::filled(8, 8, 0), &params), None);
    }

    #[test]
    fn detect_uniform_frame_spans_everything() {
        // Max-normalization maps any uniform frame to all ones, so the whole
        // frame thresholds as far field and the window covers it.
        let params = DepthPipelineParams::for_frame_size(16, 16);
        let det = detect_row_end(&DepthFrame::filled(16, 16, 500), &params).unwrap();
        assert_eq!(det.window, boxed(0, 0, 15, 15));
    }

    #[test]
    fn detect_rejects_far_patch_smaller_than_area_threshold() {
        let mut data = vec![1000u16; 64 * 64];
        for y in 0..3 {
            for x in 0..3 {
                data[y * 64 + x] = 8000;
            }
        }
        let mut params = DepthPipelineParams::for_frame_size(64, 64);
        params.t_area = 100;
        assert_eq!(detect_row_end(&frame(64, 64, data), &params), None);
    }

    #[test]
    fn obstacle_all_near_roi_stops() {
        let params = DepthPipelineParams::for_frame_size(60, 40);
        assert!(check_obstacle(&DepthFrame::filled(40, 60, 300), &params));
    }

    #[test]
    fn obstacle_all_far_roi_does_not_stop() {
        let params = DepthPipelineParams::for_frame_size(60, 40);
        assert!(!check_obstacle(&DepthFrame::filled(40, 60, 7000), &params));
    }

    #[test]
    fn obstacle_counts_near_fraction_of_valid_pixels() {
        // ROI is the central third of a 60-wide frame: columns 20..40.
        let (h, w) = (30usize, 60usize);
        let mut data = vec![7000u16; h * w];
        let mut near_target = (h * 20) / 10; // 10% of the ROI
        let mut placed = 0usize;
        'outer: for y in 0..h {
            for x in 20..40 {
                if placed == near_target {
                    break 'outer;
                }
                data[y * w + x] = 300;
                placed += 1;
            }
        }
        // Brute-force recount as the oracle.
        let f = frame(h, w, data);
        let mut valid = 0;
        let mut near = 0;
        for y in 0..h {
            for x in 20..40 {
                let v = f.get(x, y);
                if v != 0 {
                    valid += 1;
                    if v < 500 {
                        near += 1;
                    }
                }
            }
        }
        near_target = near;
        assert_eq!(near_target as f64 / valid as f64, 0.1);
        let params = DepthPipelineParams::for_frame_size(w, h);
        assert!(check_obstacle(&f, &params));
    }

    #[test]
    fn obstacle_empty_roi_is_fail_safe() {
        let params = DepthPipelineParams::for_frame_size(12, 12);
        assert!(check_obstacle(&DepthFrame::filled(12, 12, 0), &params));
    }
}
