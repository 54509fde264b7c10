/** Spawns the real authentication service for integration tests. */

import { ChildProcess, spawn } from 'node:child_process'

export interface LiveService {
  url: string
  process: ChildProcess
  stop: () => void
}

export async function startService (extraArgs: string[] = []): Promise<LiveService> {
  const python = process.env.PYTHON ?? 'python3'
  const child = spawn(
    python,
    ['-m', 'gotcha.cli', 'serve', '--port', '0',
      '--k', '3', '--alpha', '2', '--hash-cost', '0', ...extraArgs],
    { env: { ...process.env, PYTHONUNBUFFERED: '1' }, stdio: ['ignore', 'pipe', 'pipe'] }
  )
  const url = await new Promise<string>((resolve, reject) => {
    let out = ''
    let err = ''
    const timer = setTimeout(() => reject(new Error(`service did not start: ${out} ${err}`)), 15_000)
    child.stdout.on('data', (chunk: Buffer) => {
      out += chunk.toString()
      const match = out.match(/listening on (http:\/\/[^\s]+)/)
      if (match != null) {
        clearTimeout(timer)
        resolve(match[1])
      }
    })
    child.stderr.on('data', (chunk: Buffer) => { err += chunk.toString() })
    child.on('exit', (code) => {
      clearTimeout(timer)
      reject(new Error(`service exited early (${code}): ${err}`))
    })
  })
  for (let attempt = 0; ; attempt++) {
    try {
      const resp = await fetch(url + '/health')
      if (resp.ok) break
    } catch {
      if (attempt > 50) throw new Error('service never became healthy')
      await new Promise(r => setTimeout(r, 100))
    }
  }
  return { url, process: child, stop: () => { child.kill() } }
}
