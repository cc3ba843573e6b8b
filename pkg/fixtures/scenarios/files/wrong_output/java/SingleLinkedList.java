public class SingleLinkedList {
    private static class Node {
        int value;
        Node next;

        Node(int value) {
            this.value = value;
        }
    }

    private Node head;

    public void add(int value) {
        Node node = new Node(value);
        if (head == null) {
            head = node;
            return;
        }
        Node cur = head;
        while (cur.next != null) {
            cur = cur.next;
        }
        cur.next = node;
    }

    public void removeDuplicates() {
        for (Node cur = head; cur != null; cur = cur.next) {
            Node runner = cur;
            while (runner.next != null) {
                if (runner.next.value == cur.value) {
                    runner.next = runner.next.next;
                } else {
                    runner = runner.next;
                }
            }
        }
    }
}
