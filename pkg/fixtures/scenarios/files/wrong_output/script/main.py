class Node:
    def __init__(self, value):
        self.value = value
        self.next = None


class SingleLinkedList:
    def __init__(self):
        self.head = None

    def add(self, value):
        node = Node(value)
        if self.head is None:
            self.head = node
            return
        cur = self.head
        while cur.next is not None:
            cur = cur.next
        cur.next = node

    def remove_duplicates(self):
        cur = self.head
        while cur is not None:
            runner = cur
            while runner.next is not None:
                if runner.next.value == cur.value:
                    runner.next = runner.next.next
                else:
                    runner = runner.next
            cur = cur.next


if __name__ == "__main__":
    lst = SingleLinkedList()
    for v in (3, 7, 7, 9, 3):
        lst.add(v)
    print(lst)
    lst.remove_duplicates()
    print(lst)
