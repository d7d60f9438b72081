/**
 * Network templates shared with the architecture generator.
 *
 * A template fixes the functional sequence (conv/pool/fc slots) and the
 * input geometry; the manifest's counts fill in the per-slot widths. The
 * slot layouts here must match the generator's templates exactly or the
 * parameter parity checks will fail.
 */

export interface TemplateSlot {
  kind: 'conv3x3' | 'fully_connected'
  poolAfter: boolean
}

export interface Template {
  name: string
  slots: TemplateSlot[]
  inputHeight: number
  inputWidth: number
  inputChannels: number
  classCount: number
}

function slots(convCount: number, poolAfter: number[], fcCount: number): TemplateSlot[] {
  const pooled = new Set(poolAfter)
  const result: TemplateSlot[] = []
  for (let i = 1; i <= convCount; i++) {
    result.push({ kind: 'conv3x3', poolAfter: pooled.has(i) })
  }
  for (let i = 0; i < fcCount; i++) {
    result.push({ kind: 'fully_connected', poolAfter: false })
  }
  return result
}

const TEMPLATES: Record<string, () => Template> = {
  vgg16: () => ({
    name: 'vgg16',
    slots: slots(13, [2, 4, 7, 10, 13], 3),
    inputHeight: 32,
    inputWidth: 32,
    inputChannels: 3,
    classCount: 10,
  }),
  vgg10: () => ({
    name: 'vgg10',
    slots: slots(8, [2, 4, 6, 8], 2),
    inputHeight: 32,
    inputWidth: 32,
    inputChannels: 3,
    classCount: 10,
  }),
}

export function getTemplate(name: string): Template {
  const builder = TEMPLATES[name]
  if (!builder) throw new Error(`unknown template ${JSON.stringify(name)}`)
  return builder()
}
