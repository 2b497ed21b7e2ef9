// Subject flow driver: asks the server what comes next, submits one
// decision at a time, finalizes, and returns the payout. The server is the
// source of truth — after a refresh or network loss, re-running the flow
// resumes at the pending screen because `next` repeats it verbatim.

import type { SessionApi } from './api.js'
import { assertSingleSwitch, type RowChoice } from './switchpoint.js'
import type { NextStep, PayoutDraw, PriceListRowStep, SpreadDecisionStep } from './types.js'

export type SubjectStrategy = {
  priceList(step: PriceListRowStep): RowChoice | Promise<RowChoice>
  spread(step: SpreadDecisionStep): string | Promise<string>
}

export type FlowOptions = {
  /** Called with every step the server hands out (screens and terminals). */
  onStep?: (step: NextStep) => void
  /** Safety valve against a misbehaving server; the real flow needs 25. */
  maxSteps?: number
}

export async function runSubjectFlow(
  api: SessionApi,
  sessionId: string,
  subjectId: string,
  token: string,
  strategy: SubjectStrategy,
  options: FlowOptions = {},
): Promise<PayoutDraw> {
  const maxSteps = options.maxSteps ?? 100
  const answered: RowChoice[] = []

  for (let i = 0; i < maxSteps; i += 1) {
    const step = await api.nextStep(sessionId, subjectId)
    options.onStep?.(step)

    if (step.kind === 'price_list_row') {
      const chosen = await strategy.priceList(step)
      // blocked here, before any request leaves the page
      assertSingleSwitch(answered, step.row_index, chosen)
      await api.submitChoice(sessionId, subjectId, {
        token,
        part: 1,
        screen: step.screen,
        pair: null,
        chosen,
      })
      answered.push(chosen)
    } else if (step.kind === 'spread_decision') {
      const chosen = await strategy.spread(step)
      if (!(chosen in step.options)) {
        throw new Error(`strategy chose ${chosen}, not offered on pair ${step.pair}`)
      }
      await api.submitChoice(sessionId, subjectId, {
        token,
        part: 2,
        screen: step.screen,
        pair: step.pair,
        chosen,
      })
    } else if (step.kind === 'finalize') {
      await api.finalize(sessionId, subjectId, token)
    } else {
      return step.payout
    }
  }
  throw new Error(`flow did not finish within ${maxSteps} steps`)
}
