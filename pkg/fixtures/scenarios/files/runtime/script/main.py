class ArrayBinaryTree:
    def __init__(self, capacity):
        self.data = [0] * capacity
        self.size = 0

    def set_root(self, value):
        self.data[0] = value
        if self.size == 0:
            self.size = 1

    def left(self, i):
        return 2 * i + 1

    def right(self, i):
        return 2 * i + 2

    def set_left(self, i, value):
        child = self.left(i)
        if child <= len(self.data):
            self.data[child] = value
            if child + 1 > self.size:
                self.size = child + 1

    def set_right(self, i, value):
        child = self.right(i)
        if child <= len(self.data):
            self.data[child] = value
            if child + 1 > self.size:
                self.size = child + 1


if __name__ == "__main__":
    tree = ArrayBinaryTree(7)
    tree.set_root(50)
    tree.set_left(0, 30)
    tree.set_right(0, 70)
    tree.set_left(1, 20)
    tree.set_right(1, 40)
    tree.set_left(2, 60)
    tree.set_right(2, 80)
    tree.set_left(3, 10)
    print("size:", tree.size)
