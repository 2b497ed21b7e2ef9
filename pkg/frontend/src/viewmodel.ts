// Screen view models: pure functions of the service's `next` response.
// Every displayed number is a formatting of a server-sent rational string;
// nothing is computed, and buttons keep the server-chosen option order.

import { formatAmount, formatPercent } from './rational.js'
import type { LotteryJson, PriceListRowStep, SpreadDecisionStep } from './types.js'

export type OptionView = {
  label: string
  rows: { amount: string; chance: string }[]
}

export type PriceListRowView = {
  screen: string
  rowIndex: number
  winChance: string
  options: OptionView[] // in server option order
}

export type SpreadDecisionView = {
  pair: string
  prompt: string
  options: OptionView[] // in server option order
}

export type SpreadScreenView = {
  caseId: string
  decisions: SpreadDecisionView[]
}

function optionView(label: string, lottery: LotteryJson): OptionView {
  if (lottery.prizes.length !== lottery.probs.length) {
    throw new Error(`option ${label}: ${lottery.prizes.length} prizes vs ${lottery.probs.length} probabilities`)
  }
  const rows = lottery.prizes.map((prize, i) => ({
    amount: formatAmount(prize),
    chance: formatPercent(lottery.probs[i]!),
  }))
  return { label, rows }
}

function orderedOptions(
  options: Record<string, LotteryJson>,
  order: readonly string[],
): OptionView[] {
  return order.map((label) => {
    const lottery = options[label]
    if (lottery === undefined) {
      throw new Error(`option order names ${label}, which the server did not send`)
    }
    return optionView(label, lottery)
  })
}

export function priceListRowView(step: PriceListRowStep): PriceListRowView {
  return {
    screen: step.screen,
    rowIndex: step.row_index,
    winChance: formatPercent(step.p),
    options: orderedOptions(step.options, step.option_order),
  }
}

export function spreadDecisionView(step: SpreadDecisionStep): SpreadDecisionView {
  return {
    pair: step.pair,
    prompt: `choose one lottery: ${step.pair[0]} or ${step.pair[1]}`,
    options: orderedOptions(step.options, step.option_order),
  }
}

/**
 * One spread screen shows the case's decisions together; the page collects
 * the consecutive `next` responses that share a screen id and renders both
 * decisions before the subject continues.
 */
export function spreadScreenView(steps: readonly SpreadDecisionStep[]): SpreadScreenView {
  if (steps.length === 0) {
    throw new Error('a spread screen needs at least one decision')
  }
  const caseId = steps[0]!.screen
  for (const step of steps) {
    if (step.screen !== caseId) {
      throw new Error(`mixed screens in one view: ${caseId} and ${step.screen}`)
    }
  }
  return { caseId, decisions: steps.map(spreadDecisionView) }
}
