/** Model behind the matching board.
 *
 * Labels arrive in wire order (the stored order) but are displayed
 * alphabetically; the model keeps the mapping so the submitted response
 * is always in wire order.  Assignments are label -> image index, and
 * assigning an image that another label already holds swaps the two
 * labels' images, so the partial map stays injective at every step and a
 * complete map is automatically a bijection.  There is no way to build a
 * non-bijective submission through this model.
 */

export interface DisplayLabel {
  text: string
  /** 1-based position of this label in the wire-order label list. */
  wirePos: number
}

export class AssignmentModel {
  readonly k: number
  readonly display: DisplayLabel[]
  /** wirePos (1..k) -> image index (1..k), sparse until complete. */
  private assigned = new Map<number, number>()

  constructor (wireLabels: string[]) {
    this.k = wireLabels.length
    this.display = wireLabels
      .map((text, i) => ({ text, wirePos: i + 1 }))
      .sort((a, b) => (a.text < b.text ? -1 : a.text > b.text ? 1 : a.wirePos - b.wirePos))
  }

  imageFor (wirePos: number): number | undefined {
    return this.assigned.get(wirePos)
  }

  labelHolding (image: number): number | undefined {
    for (const [wirePos, img] of this.assigned) {
      if (img === image) return wirePos
    }
    return undefined
  }

  /** Assign image to the label at wirePos; swaps with any current holder. */
  assign (wirePos: number, image: number): void {
    if (wirePos < 1 || wirePos > this.k) throw new Error(`label position ${wirePos} out of range`)
    if (image < 1 || image > this.k) throw new Error(`image index ${image} out of range`)
    const holder = this.labelHolding(image)
    const previous = this.assigned.get(wirePos)
    if (holder !== undefined && holder !== wirePos) {
      if (previous !== undefined) {
        this.assigned.set(holder, previous)
      } else {
        this.assigned.delete(holder)
      }
    }
    this.assigned.set(wirePos, image)
  }

  clear (wirePos: number): void {
    this.assigned.delete(wirePos)
  }

  isComplete (): boolean {
    return this.assigned.size === this.k
  }

  /** Wire-order response: entry i-1 is the image assigned to label position i. */
  toResponse (): number[] {
    if (!this.isComplete()) throw new Error('assignment is not total yet')
    const response: number[] = []
    for (let wirePos = 1; wirePos <= this.k; wirePos++) {
      const image = this.assigned.get(wirePos)
      if (image === undefined) throw new Error('assignment is not total yet')
      response.push(image)
    }
    const seen = new Set(response)
    if (seen.size !== this.k) throw new Error('assignment is not a bijection')
    return response
  }
}
