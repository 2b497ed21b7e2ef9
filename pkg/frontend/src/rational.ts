// Display formatting for the server's rational strings. Everything here is
// exact integer arithmetic on the received numerator/denominator — the
// client never derives a probability or amount of its own.

export type Rational = { num: bigint; den: bigint }

export function parseRational(text: string): Rational {
  const match = /^(-?\d+)(?:\/(\d+))?$/.exec(text.trim())
  if (!match || match[1] === undefined) {
    throw new Error(`not a rational string: ${JSON.stringify(text)}`)
  }
  const num = BigInt(match[1])
  const den = match[2] === undefined ? 1n : BigInt(match[2])
  if (den === 0n) {
    throw new Error(`zero denominator: ${JSON.stringify(text)}`)
  }
  return { num, den }
}

export function rationalToNumber(text: string): number {
  const { num, den } = parseRational(text)
  return Number(num) / Number(den)
}

/** "9/10" -> "90%", "21/100" -> "21%", "1/3" -> "33.33%" (two decimals max). */
export function formatPercent(prob: string): string {
  const { num, den } = parseRational(prob)
  if (num < 0n) {
    throw new Error(`negative probability: ${JSON.stringify(prob)}`)
  }
  // hundredths of a percent, rounded half up: floor((2*num*10000 + den) / (2*den))
  const hundredths = (num * 20000n + den) / (den * 2n)
  const units = hundredths / 100n
  const rest = hundredths % 100n
  if (rest === 0n) {
    return `${units}%`
  }
  const fraction = rest.toString().padStart(2, '0').replace(/0$/, '')
  return `${units}.${fraction}%`
}

/** "77/2" -> "38.50", "16" -> "16.00" (currency-style, two decimals). */
export function formatAmount(amount: string): string {
  const { num, den } = parseRational(amount)
  const sign = num < 0n ? '-' : ''
  const abs = num < 0n ? -num : num
  const cents = (abs * 200n + den) / (den * 2n) // round half up
  const units = cents / 100n
  const rest = (cents % 100n).toString().padStart(2, '0')
  return `${sign}${units}.${rest}`
}
