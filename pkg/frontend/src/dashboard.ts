// Experimenter dashboard view models. Region polygons, the feasible
// triangles, and the corner point all come from the service's geometry
// JSON — the client only scales rational coordinates onto a canvas.

import { rationalToNumber } from './rational.js'
import type { DashboardData, GeometryJson, RationalPair } from './types.js'

export type CanvasPoint = { x: number; y: number }

export type RegionShape = {
  name: string
  pattern: string
  points: CanvasPoint[]
  path: string // SVG path, y axis flipped so u2 points up
}

export type HistogramBar = { safeCount: number; subjects: number }

export type PatternTotals = Record<string, number>

function toCanvas(vertex: RationalPair, width: number, height: number): CanvasPoint {
  const u1 = rationalToNumber(vertex[0])
  const u2 = rationalToNumber(vertex[1])
  return { x: u1 * width, y: (1 - u2) * height }
}

function toPath(points: readonly CanvasPoint[]): string {
  const parts = points.map(
    (p, i) => `${i === 0 ? 'M' : 'L'}${p.x.toFixed(2)},${p.y.toFixed(2)}`,
  )
  return `${parts.join(' ')} Z`
}

export function regionShapes(
  geometry: GeometryJson,
  width: number,
  height: number,
): RegionShape[] {
  return Object.entries(geometry.regions).map(([name, region]) => {
    const points = region.vertices.map((v) => toCanvas(v, width, height))
    return { name, pattern: region.pattern, points, path: toPath(points) }
  })
}

export function triangleShapes(
  geometry: GeometryJson,
  width: number,
  height: number,
): { safeCount: number; path: string }[] {
  return Object.entries(geometry.triangles).map(([s, triangle]) => ({
    safeCount: Number(s),
    path: toPath(triangle.vertices.map((v) => toCanvas(v, width, height))),
  }))
}

/** Pattern counts pooled over the six screens. */
export function patternTotals(data: DashboardData): PatternTotals {
  const totals: PatternTotals = {}
  for (const counts of Object.values(data.pattern_counts)) {
    for (const [pattern, n] of Object.entries(counts)) {
      totals[pattern] = (totals[pattern] ?? 0) + n
    }
  }
  return totals
}

/** Histogram bars for safe counts 0..10, zero-filled and ordered. */
export function histogramBars(data: DashboardData): HistogramBar[] {
  const bars: HistogramBar[] = []
  for (let s = 0; s <= 10; s += 1) {
    bars.push({ safeCount: s, subjects: data.safe_count_histogram[String(s)] ?? 0 })
  }
  return bars
}

export function completionSummary(data: DashboardData): {
  registered: number
  complete: number
  finalized: number
} {
  const progress = Object.values(data.progress)
  return {
    registered: progress.length,
    complete: progress.filter((p) => p.complete).length,
    finalized: progress.filter((p) => p.finalized).length,
  }
}
