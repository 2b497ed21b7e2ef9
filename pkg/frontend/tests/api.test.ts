// Error-shape handling against recorded service responses: wrong screen,
// bad token, duplicate and conflicting submissions.

import { afterEach, expect, test } from 'vitest'

import { ApiError, createSessionApi } from '../src/api.js'
import { startTape, type Tape } from './tape.js'

let tape: Tape | undefined

afterEach(async () => {
  await tape?.close()
  tape = undefined
})

test('service protocol errors surface as typed ApiError values', async () => {
  tape = await startTape('protocol_errors')
  const api = createSessionApi(tape.url)
  await api.createSession({ session_id: 'fix3', seed: 1 })
  const reg = await api.registerSubject('fix3')

  // submitting for a screen that is not the pending one -> 409 wrong_screen
  const wrongScreen = api.submitChoice('fix3', reg.subject_id, {
    token: reg.token,
    part: 1,
    screen: '2',
    pair: null,
    chosen: 'safe',
  })
  await expect(wrongScreen).rejects.toThrowError(ApiError)
  await wrongScreen.catch((err: ApiError) => {
    expect(err.status).toBe(409)
    expect(err.code).toBe('wrong_screen')
    expect(err.message).toMatch(/expected row 1/)
  })

  // a stale or foreign token -> 403 bad_token
  const badToken = api.submitChoice('fix3', reg.subject_id, {
    token: 'intruder',
    part: 1,
    screen: '1',
    pair: null,
    chosen: 'safe',
  })
  await expect(badToken).rejects.toThrowError(ApiError)
  await badToken.catch((err: ApiError) => {
    expect(err.status).toBe(403)
    expect(err.code).toBe('bad_token')
  })

  // a valid submission records
  const ack = await api.submitChoice('fix3', reg.subject_id, {
    token: reg.token,
    part: 1,
    screen: '1',
    pair: null,
    chosen: 'safe',
  })
  expect(ack).toEqual({ status: 'ok', duplicate: false })

  // resubmitting the identical choice is acknowledged idempotently
  const dup = await api.submitChoice('fix3', reg.subject_id, {
    token: reg.token,
    part: 1,
    screen: '1',
    pair: null,
    chosen: 'safe',
  })
  expect(dup).toEqual({ status: 'ok', duplicate: true })

  // resubmitting a different choice for a decided screen conflicts
  const conflict = api.submitChoice('fix3', reg.subject_id, {
    token: reg.token,
    part: 1,
    screen: '1',
    pair: null,
    chosen: 'risky',
  })
  await expect(conflict).rejects.toThrowError(ApiError)
  await conflict.catch((err: ApiError) => {
    expect(err.status).toBe(409)
    expect(err.code).toBe('conflict')
  })

  expect(tape.mismatches()).toEqual([])
  expect(tape.remaining()).toBe(0)
})
