/** Shared fixtures: generated manifests, digits data, generator CLI calls. */

import { execFileSync } from 'child_process'
import { existsSync, mkdirSync, readdirSync } from 'fs'
import { join, resolve } from 'path'

export const TRAINER_ROOT = resolve(__dirname, '..')
export const REPO_ROOT = resolve(TRAINER_ROOT, '..')
export const FIXTURES = join(TRAINER_ROOT, '.test-fixtures')

/** Run the generator CLI (the primary package) and return stdout. */
export function featuregrid(...args: string[]): string {
  return execFileSync('python3', ['-m', 'featuregrid.cli', ...args], {
    cwd: REPO_ROOT,
    encoding: 'utf-8',
    maxBuffer: 64 * 1024 * 1024,
  })
}

/** Full-budget manifest family (one per valid grid triple). Generated once
 * per test session; ~2 s. */
export function fullFamilyDir(): string {
  const dir = join(FIXTURES, 'family-full')
  if (!existsSync(dir) || readdirSync(dir).filter((f) => f.endsWith('.manifest.json')).length === 0) {
    mkdirSync(dir, { recursive: true })
    featuregrid('grid', '--out', dir, '--dataset', 'cifar10')
  }
  return dir
}

/** Desk-scale 10-slot family at a reduced feature budget, for training. */
export function deskFamilyDir(): string {
  const dir = join(FIXTURES, 'family-desk')
  if (!existsSync(dir) || readdirSync(dir).filter((f) => f.endsWith('.manifest.json')).length === 0) {
    mkdirSync(dir, { recursive: true })
    featuregrid('grid', '--layers', '10', '--budget', '320', '--out', dir,
                '--dataset', 'mnist')
  }
  return dir
}

/** Handwritten-digits IDX files (offline stand-in data), exported once. */
export function digitsDataDir(): string {
  const dir = join(FIXTURES, 'digits-idx')
  if (!existsSync(join(dir, 'train-images-idx3-ubyte'))) {
    execFileSync('python3', [join(TRAINER_ROOT, 'scripts', 'export_digits_idx.py'), dir], {
      encoding: 'utf-8',
    })
  }
  return dir
}

export function manifestFiles(dir: string): string[] {
  return readdirSync(dir).filter((f) => f.endsWith('.manifest.json')).sort()
}

/** Real MNIST IDX directory, when the environment provides one. */
export function mnistDataDir(): string | null {
  const candidate = process.env.TRAINER_MNIST_DIR
  if (candidate && existsSync(join(candidate, 'train-images-idx3-ubyte'))) return candidate
  if (candidate && existsSync(join(candidate, 'train-images-idx3-ubyte.gz'))) return candidate
  return null
}
