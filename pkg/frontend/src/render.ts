// Minimal DOM rendering: plain tables and buttons built from view models.
// All content comes from the view models; the only state here is which
// button the subject pressed.

import type {
  OptionView,
  PriceListRowView,
  SpreadScreenView,
} from './viewmodel.js'
import type { HistogramBar, RegionShape } from './dashboard.js'

const REGION_FILL: Record<string, string> = {
  red: '#d64545',
  yellow: '#e3b341',
  green: '#3f9d56',
  blue: '#4472c4',
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  if (className) {
    node.className = className
  }
  if (text !== undefined) {
    node.textContent = text
  }
  return node
}

function optionTable(option: OptionView): HTMLTableElement {
  const table = el('table', 'option-table')
  const head = table.createTHead().insertRow()
  head.insertCell().textContent = 'prize'
  head.insertCell().textContent = 'chance'
  const body = table.createTBody()
  for (const row of option.rows) {
    const tr = body.insertRow()
    tr.insertCell().textContent = row.amount
    tr.insertCell().textContent = row.chance
  }
  return table
}

function optionButton(option: OptionView, onChoose: (label: string) => void): HTMLElement {
  const wrap = el('div', 'option')
  wrap.appendChild(optionTable(option))
  const button = el('button', 'choose', `choose ${option.label}`)
  button.addEventListener('click', () => onChoose(option.label))
  wrap.appendChild(button)
  return wrap
}

export function renderPriceListRow(
  container: HTMLElement,
  view: PriceListRowView,
  onChoose: (label: string) => void,
  note?: string,
): void {
  container.replaceChildren()
  container.appendChild(el('h2', 'title', `Part 1 — row ${view.rowIndex} of 10`))
  container.appendChild(el('p', 'subtitle', `win chance this row: ${view.winChance}`))
  if (note) {
    container.appendChild(el('p', 'note', note))
  }
  const strip = el('div', 'options')
  for (const option of view.options) {
    strip.appendChild(optionButton(option, onChoose))
  }
  container.appendChild(strip)
}

export function renderSpreadScreen(
  container: HTMLElement,
  view: SpreadScreenView,
  activePair: string,
  onChoose: (pair: string, label: string) => void,
): void {
  container.replaceChildren()
  container.appendChild(el('h2', 'title', `Part 2 — screen ${view.caseId}`))
  for (const decision of view.decisions) {
    const block = el('section', decision.pair === activePair ? 'decision active' : 'decision')
    block.appendChild(el('h3', 'prompt', decision.prompt))
    const strip = el('div', 'options')
    for (const option of decision.options) {
      strip.appendChild(optionButton(option, (label) => onChoose(decision.pair, label)))
    }
    block.appendChild(strip)
    container.appendChild(block)
  }
}

export function renderPayout(container: HTMLElement, total: string, detail: string): void {
  container.replaceChildren()
  container.appendChild(el('h2', 'title', 'Session complete'))
  container.appendChild(el('p', 'payout', `payout: ${total}`))
  container.appendChild(el('p', 'detail', detail))
}

const SVG_NS = 'http://www.w3.org/2000/svg'

export function renderSimplex(
  svg: SVGSVGElement,
  shapes: readonly RegionShape[],
): void {
  svg.replaceChildren()
  for (const shape of shapes) {
    const path = document.createElementNS(SVG_NS, 'path')
    path.setAttribute('d', shape.path)
    path.setAttribute('fill', REGION_FILL[shape.name] ?? '#999999')
    path.setAttribute('fill-opacity', '0.6')
    path.setAttribute('stroke', '#333333')
    path.appendChild(document.createElementNS(SVG_NS, 'title')).textContent =
      `${shape.name} (${shape.pattern})`
    svg.appendChild(path)
  }
}

export function renderHistogram(container: HTMLElement, bars: readonly HistogramBar[]): void {
  container.replaceChildren()
  const most = Math.max(1, ...bars.map((b) => b.subjects))
  for (const bar of bars) {
    const row = el('div', 'bar-row')
    row.appendChild(el('span', 'bar-label', String(bar.safeCount)))
    const fill = el('div', 'bar')
    fill.style.width = `${(bar.subjects / most) * 100}%`
    fill.title = `${bar.subjects} subject(s)`
    row.appendChild(fill)
    row.appendChild(el('span', 'bar-count', String(bar.subjects)))
    container.appendChild(row)
  }
}
