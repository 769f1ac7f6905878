/** Schematic scene layout: clusters left to right, stacks drawn vertically.
 *
 * Pure geometry over the server's scene JSON; no predicate logic here.
 */

import type { SceneJson, StructureJson } from "./types.js";

export interface PlacedBlock {
  color: string;
  x: number; // grid column
  y: number; // 0 = table, counts upward
}

const INTRA_GAP = 1.25; // structures in one cluster sit close together
const CLUSTER_GAP = 2.5; // clusters are visibly separated

function structureWidth(structure: StructureJson): number {
  return structure.kind === "pyramid" ? 2 : 1;
}

function placeStructure(structure: StructureJson, x: number): PlacedBlock[] {
  if (structure.kind === "single") {
    return [{ color: structure.block, x, y: 0 }];
  }
  if (structure.kind === "stack") {
    return structure.blocks.map((color, level) => ({ color, x, y: level }));
  }
  const [left, right] = structure.base;
  return [
    { color: left, x, y: 0 },
    { color: right, x: x + 1, y: 0 },
    { color: structure.top, x: x + 0.5, y: 1 },
  ];
}

export function layoutScene(scene: SceneJson): PlacedBlock[] {
  const placed: PlacedBlock[] = [];
  let x = 0;
  scene.clusters.forEach((cluster, clusterIndex) => {
    if (clusterIndex > 0) x += CLUSTER_GAP - INTRA_GAP;
    for (const structureIndex of cluster) {
      const structure = scene.structures[structureIndex];
      placed.push(...placeStructure(structure, x));
      x += structureWidth(structure) - 1 + INTRA_GAP;
    }
  });
  return placed;
}

const UNIT = 34;
const PAD = 12;

/** Render the layout as a standalone SVG string. */
export function renderSceneSVG(scene: SceneJson): string {
  const blocks = layoutScene(scene);
  if (blocks.length === 0) return `<svg class="scene" width="80" height="60"></svg>`;
  const maxX = Math.max(...blocks.map((b) => b.x));
  const maxY = Math.max(...blocks.map((b) => b.y));
  const width = PAD * 2 + (maxX + 1) * UNIT;
  const height = PAD * 2 + (maxY + 1) * UNIT + 4;
  const rects = blocks
    .map((block) => {
      const px = PAD + block.x * UNIT;
      const py = height - PAD - 4 - (block.y + 1) * UNIT;
      return (
        `<rect x="${px}" y="${py}" width="${UNIT - 4}" height="${UNIT - 4}" ` +
        `rx="4" class="block block-${block.color}"><title>${block.color}</title></rect>`
      );
    })
    .join("");
  const table = `<line x1="0" y1="${height - PAD}" x2="${width}" y2="${height - PAD}" class="table"/>`;
  return `<svg class="scene" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">${rects}${table}</svg>`;
}
