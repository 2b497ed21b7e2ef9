// Wire types for the session service. Field names and value encodings match
// the server's JSON exactly: probabilities and prize amounts travel as
// rational strings ("21/100", "77/2") and are never recomputed client-side.

export type LotteryJson = {
  prizes: string[]
  probs: string[]
}

export type PriceListRowStep = {
  kind: 'price_list_row'
  part: 1
  screen: string
  row_index: number
  p: string
  options: { safe: LotteryJson; risky: LotteryJson }
  option_order: string[]
}

export type SpreadDecisionStep = {
  kind: 'spread_decision'
  part: 2
  screen: string
  pair: string
  options: Record<string, LotteryJson>
  option_order: string[]
}

export type FinalizeStep = { kind: 'finalize' }

export type DoneStep = { kind: 'done'; payout: PayoutDraw }

export type NextStep = PriceListRowStep | SpreadDecisionStep | FinalizeStep | DoneStep

export type PayoutDraw = {
  seed: string
  price_list: { row_index: number; chosen: string; draw_bits: string; prize: string }
  spread_screen: {
    case_id: string
    pair: string
    chosen: string
    draw_bits: string
    prize: string
  }
  total: string
}

export type SessionCreated = { session_id: string; seed: number }

export type Registration = { subject_id: string; token: string }

export type SubmitChoiceBody = {
  token: string
  part: number
  screen: string
  pair: string | null
  chosen: string
}

export type SubmitAck = { status: 'ok'; duplicate: boolean }

export type SubjectProgress = {
  price_list_rows: number
  screen_decisions: number
  complete: boolean
  finalized: boolean
}

export type RationalPair = [string, string]

export type RegionJson = { pattern: string; vertices: RationalPair[] }

export type GeometryJson = {
  simplex: { vertices: RationalPair[] }
  corner: RationalPair
  regions: Record<string, RegionJson>
  triangles: Record<string, { vertices: RationalPair[] }>
}

export type DashboardData = {
  session_id: string
  seed: number
  closed: boolean
  n_subjects: number
  progress: Record<string, SubjectProgress>
  pattern_counts: Record<string, Record<string, number>>
  safe_count_histogram: Record<string, number>
  geometry: GeometryJson
}

export type ErrorBody = { error: string; message: string }
