/** Edge/node color math. Each edge runs a gradient from a light shade of
 * its kind color at the source to a dark shade at the target, which is how
 * direction is read off the picture without arrowheads. */

import type { EdgeKindStyle, Rgb } from "./types.js";

export const FALLBACK_KIND_COLOR: Rgb = [160, 160, 160];
export const GHOST_COLOR: Rgb = [70, 70, 80];

const LIGHT_MIX = 0.45; // toward white at the source end
const DARK_MIX = 0.55; // toward black at the target end

export function mix(a: Rgb, b: Rgb, t: number): Rgb {
  return [
    a[0] + (b[0] - a[0]) * t,
    a[1] + (b[1] - a[1]) * t,
    a[2] + (b[2] - a[2]) * t,
  ];
}

export function lightShade(color: Rgb): Rgb {
  return mix(color, [255, 255, 255], LIGHT_MIX);
}

export function darkShade(color: Rgb): Rgb {
  return mix(color, [0, 0, 0], DARK_MIX);
}

/** Relative luminance (Rec. 709 weights), 0..255 scale. */
export function luminance(color: Rgb): number {
  return 0.2126 * color[0] + 0.7152 * color[1] + 0.0722 * color[2];
}

export function kindColor(kinds: Map<string, EdgeKindStyle>, name: string): Rgb {
  const style = kinds.get(name);
  return style ? style.color : FALLBACK_KIND_COLOR;
}

/** 0..255 triple to the 0..1 floats GPU buffers want. */
export function toUnit(color: Rgb): Rgb {
  return [color[0] / 255, color[1] / 255, color[2] / 255];
}
