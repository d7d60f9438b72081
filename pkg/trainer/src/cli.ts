/**
 * Trainer command line.
 *
 *   train    --manifest m.json --data-root data/ --out results.csv
 *            [--subset 0.1] [--seed 0] [--max-epochs 3]
 *   parity   --manifests dir/ [--limit N]
 *   lr-table --manifest m.json
 *
 * stdout carries data; progress and diagnostics go to stderr.
 */

import { readdirSync } from 'fs'
import { join } from 'path'

import * as tf from '@tensorflow/tfjs'
import '@tensorflow/tfjs-backend-wasm'

import { loadManifest } from './manifest'
import { buildNetwork, trainableParameterCount } from './model'
import { epochLearningRates } from './schedule'
import { selectBackend, train } from './train'

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>()
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i]
    if (!key.startsWith('--') || i + 1 >= argv.length) {
      throw new Error(`expected --flag value pairs, got ${JSON.stringify(argv)}`)
    }
    flags.set(key.slice(2), argv[i + 1])
  }
  return flags
}

function required(flags: Map<string, string>, name: string): string {
  const value = flags.get(name)
  if (value === undefined) throw new Error(`missing required flag --${name}`)
  return value
}

async function cmdTrain(flags: Map<string, string>): Promise<number> {
  const outcome = await train({
    manifestPath: required(flags, 'manifest'),
    dataRoot: required(flags, 'data-root'),
    resultsPath: required(flags, 'out'),
    subsetFraction: flags.has('subset') ? Number(flags.get('subset')) : 1.0,
    seed: flags.has('seed') ? Number(flags.get('seed')) : undefined,
    maxEpochs: flags.has('max-epochs') ? Number(flags.get('max-epochs')) : undefined,
  })
  const last = outcome.rows[outcome.rows.length - 1]
  process.stdout.write(
    `${outcome.manifest.archId},${outcome.manifest.dataset},` +
    `${outcome.rows.length},${last.valAccuracy}\n`,
  )
  return 0
}

async function cmdParity(flags: Map<string, string>): Promise<number> {
  await selectBackend('cpu')  // zeros-init topology checks; no compute to speed up
  const dir = required(flags, 'manifests')
  const limit = flags.has('limit') ? Number(flags.get('limit')) : Infinity
  const files = readdirSync(dir).filter((f) => f.endsWith('.manifest.json')).sort()
  let failures = 0
  let checked = 0
  process.stdout.write('arch_id,built,expected,ok\n')
  for (const file of files) {
    if (checked >= limit) break
    const manifest = loadManifest(join(dir, file))
    const model = buildNetwork(manifest, { init: 'zeros' })
    const built = trainableParameterCount(model)
    model.dispose()
    const ok = built === manifest.parameterCount
    if (!ok) failures += 1
    process.stdout.write(`${manifest.archId},${built},${manifest.parameterCount},${ok}\n`)
    checked += 1
  }
  process.stderr.write(`parity: ${checked - failures}/${checked} manifests match\n`)
  return failures === 0 ? 0 : 1
}

function cmdLrTable(flags: Map<string, string>): number {
  const manifest = loadManifest(required(flags, 'manifest'))
  process.stdout.write('epoch,lr\n')
  epochLearningRates(manifest.schedule).forEach((lr, epoch) => {
    process.stdout.write(`${epoch},${lr}\n`)
  })
  return 0
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv
  try {
    const flags = parseFlags(rest)
    switch (command) {
      case 'train':
        return await cmdTrain(flags)
      case 'parity':
        return await cmdParity(flags)
      case 'lr-table':
        return cmdLrTable(flags)
      default:
        process.stderr.write('usage: trainer <train|parity|lr-table> [--flags]\n')
        return 2
    }
  } catch (error) {
    process.stderr.write(`error: ${(error as Error).message}\n`)
    return 1
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code
  })
}
