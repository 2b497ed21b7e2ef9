// Client-side price-list protocol: rows arrive in order, and once the
// subject has gone risky they may not come back to safe (a single switch
// point). The server enforces the same rule; this module lets the page
// block and explain the violation before a request is ever sent.

export type RowChoice = 'safe' | 'risky'

export class SingleSwitchViolation extends Error {
  constructor(readonly rowIndex: number) {
    super(
      `row ${rowIndex}: choosing safe after a risky row would be a second ` +
        `switch point; go back instead`,
    )
    this.name = 'SingleSwitchViolation'
  }
}

/** Choices still allowed at the next row, given the rows answered so far. */
export function allowedChoices(answered: readonly RowChoice[]): RowChoice[] {
  return answered.includes('risky') ? ['risky'] : ['safe', 'risky']
}

export function violatesSingleSwitch(
  answered: readonly RowChoice[],
  chosen: RowChoice,
): boolean {
  return chosen === 'safe' && answered.includes('risky')
}

/** Throws unless `chosen` keeps the answered prefix single-switch. */
export function assertSingleSwitch(
  answered: readonly RowChoice[],
  rowIndex: number,
  chosen: RowChoice,
): void {
  if (violatesSingleSwitch(answered, chosen)) {
    throw new SingleSwitchViolation(rowIndex)
  }
}

/** The safe count s of a complete, single-switch list of row choices. */
export function switchPoint(choices: readonly RowChoice[]): number {
  let count = 0
  for (const choice of choices) {
    if (choice === 'safe') {
      count += 1
    }
  }
  return count
}
