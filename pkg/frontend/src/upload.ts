/** Query-by-snapshot helpers: crop rectangle handling and the multipart
 * payload for POST /api/search/image. */

export interface CropRect {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** Normalize a drag rectangle (any corner order) and clamp it to the image. */
export function clampCrop(
  drag: { x0: number; y0: number; x1: number; y1: number },
  imageW: number,
  imageH: number,
): CropRect | null {
  const x = Math.max(0, Math.min(drag.x0, drag.x1));
  const y = Math.max(0, Math.min(drag.y0, drag.y1));
  const x2 = Math.min(imageW, Math.max(drag.x0, drag.x1));
  const y2 = Math.min(imageH, Math.max(drag.y0, drag.y1));
  const w = x2 - x;
  const h = y2 - y;
  if (w <= 0 || h <= 0) return null;
  return { x, y, w, h };
}

export function bboxParam(crop: CropRect): string {
  return `${crop.x},${crop.y},${crop.w},${crop.h}`;
}

export function buildEmbedForm(file: Blob, filename: string, crop?: CropRect): FormData {
  const form = new FormData();
  form.set("image", file, filename);
  if (crop) form.set("bbox", bboxParam(crop));
  return form;
}
