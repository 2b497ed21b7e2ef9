// Browser entry point. Two page modes, picked by URL hash parameters:
//
//   #mode=subject&base=http://host:8000&session=s1&subject=S001&token=...
//   #mode=dashboard&base=http://host:8000&session=s1
//
// The subject page walks the two-part flow one server-ordered screen at a
// time; the dashboard page polls live aggregates and draws the simplex
// regions straight from the service's geometry JSON.

import { ApiError, createSessionApi, type SessionApi } from './api.js'
import { completionSummary, histogramBars, regionShapes } from './dashboard.js'
import { runSubjectFlow } from './flow.js'
import { SingleSwitchViolation, type RowChoice } from './switchpoint.js'
import type { SpreadDecisionStep } from './types.js'
import {
  renderHistogram,
  renderPayout,
  renderPriceListRow,
  renderSimplex,
  renderSpreadScreen,
} from './render.js'
import { priceListRowView, spreadScreenView } from './viewmodel.js'

function hashParams(): Map<string, string> {
  const params = new Map<string, string>()
  for (const piece of window.location.hash.replace(/^#/, '').split('&')) {
    const eq = piece.indexOf('=')
    if (eq > 0) {
      params.set(piece.slice(0, eq), decodeURIComponent(piece.slice(eq + 1)))
    }
  }
  return params
}

function need(params: Map<string, string>, key: string): string {
  const value = params.get(key)
  if (!value) {
    throw new Error(`missing #${key}=... in the page URL`)
  }
  return value
}

async function subjectPage(
  api: SessionApi,
  root: HTMLElement,
  sessionId: string,
  subjectId: string,
  token: string,
): Promise<void> {
  let note: string | undefined
  let screenSteps: SpreadDecisionStep[] = []

  const payout = await runSubjectFlow(api, sessionId, subjectId, token, {
    priceList: (step) =>
      new Promise<RowChoice>((resolve) => {
        renderPriceListRow(root, priceListRowView(step), (label) => resolve(label as RowChoice), note)
        note = undefined
      }),
    spread: (step) =>
      new Promise<string>((resolve) => {
        if (screenSteps.length === 0 || screenSteps[0]!.screen !== step.screen) {
          screenSteps = [step]
        } else if (!screenSteps.some((s) => s.pair === step.pair)) {
          screenSteps.push(step)
        }
        renderSpreadScreen(root, spreadScreenView(screenSteps), step.pair, (pair, label) => {
          if (pair === step.pair) {
            resolve(label)
          }
        })
      }),
  }).catch(async (error: unknown) => {
    if (error instanceof SingleSwitchViolation || (error instanceof ApiError && error.status === 409)) {
      note = error.message
      return subjectPage(api, root, sessionId, subjectId, token).then(() => undefined)
    }
    throw error
  })

  if (payout) {
    renderPayout(
      root,
      payout.total,
      `price-list row ${payout.price_list.row_index} paid ${payout.price_list.prize}; ` +
        `screen ${payout.spread_screen.case_id} paid ${payout.spread_screen.prize}`,
    )
  }
}

async function dashboardPage(api: SessionApi, root: HTMLElement, sessionId: string): Promise<void> {
  root.replaceChildren()
  const heading = document.createElement('h1')
  const counts = document.createElement('p')
  const svg = document.createElementNS('http://www.w3.org/2000/svg', 'svg')
  svg.setAttribute('viewBox', '0 0 400 400')
  svg.setAttribute('width', '400')
  const bars = document.createElement('div')
  root.append(heading, counts, svg, bars)

  const refresh = async () => {
    const data = await api.dashboard(sessionId)
    const done = completionSummary(data)
    heading.textContent = `session ${data.session_id}${data.closed ? ' (closed)' : ''}`
    counts.textContent =
      `${done.registered} registered, ${done.complete} complete, ${done.finalized} paid`
    renderSimplex(svg, regionShapes(data.geometry, 400, 400))
    renderHistogram(bars, histogramBars(data))
  }
  await refresh()
  window.setInterval(() => void refresh().catch(() => undefined), 5000)
}

export async function start(root: HTMLElement): Promise<void> {
  const params = hashParams()
  const api = createSessionApi(params.get('base') ?? '')
  const session = need(params, 'session')
  if ((params.get('mode') ?? 'subject') === 'dashboard') {
    await dashboardPage(api, root, session)
    return
  }
  let subjectId = params.get('subject')
  let token = params.get('token')
  if (!subjectId || !token) {
    // first visit: register, then pin the identity into the URL so a
    // refresh resumes this subject instead of creating a new one
    const reg = await api.registerSubject(session)
    subjectId = reg.subject_id
    token = reg.token
    const base = params.get('base')
    window.location.hash =
      `mode=subject${base ? `&base=${encodeURIComponent(base)}` : ''}` +
      `&session=${session}&subject=${subjectId}&token=${token}`
  }
  await subjectPage(api, root, session, subjectId, token)
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  void start(document.getElementById('app')!)
}
